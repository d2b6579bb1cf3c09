#include "gdp/chain_io.hpp"

#include <fstream>
#include <json.hpp>
#include <string>
#include <vector>

#include "gdp/error.hpp"

namespace gdp {

using nlohmann::json;

ChainFileMeta chain_meta(const GibbsEngine& engine) {
  ChainFileMeta meta;
  meta.L = engine.config().L;
  meta.dim = engine.data().dim;
  meta.nodes = engine.ldag().dag.node_count;
  meta.root = engine.ldag().root;
  meta.hidden_root = engine.ldag().hidden_root_added;
  meta.group_nodes = engine.data().group_node;
  for (const auto& g : engine.data().groups) meta.group_sizes.push_back(g.rows());
  meta.layers = engine.ldag().layer;
  meta.schedule = engine.config().mcmc;
  return meta;
}

namespace {

json schedule_to_json(const McmcSchedule& s) {
  return json{{"iterations", s.iterations},
              {"burnin", s.burnin},
              {"thinning", s.thinning},
              {"chains", s.chains},
              {"seed", s.seed}};
}

McmcSchedule schedule_from_json(const json& j) {
  McmcSchedule s;
  s.iterations = j.at("iterations").get<int>();
  s.burnin = j.at("burnin").get<int>();
  s.thinning = j.at("thinning").get<int>();
  s.chains = j.at("chains").get<int>();
  s.seed = j.at("seed").get<std::uint64_t>();
  return s;
}

// Node-indexed vectors drop the unused slot 0 on disk.
template <typename T>
json strip_slot0(const std::vector<T>& v) {
  json arr = json::array();
  for (std::size_t i = 1; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

json sample_to_json(const ChainState& s, int chain, long index) {
  json rec;
  rec["record"] = "sample";
  rec["chain"] = chain;
  rec["index"] = index;
  rec["alpha"] = strip_slot0(s.alpha);
  rec["beta"] = strip_slot0(s.weights.beta);
  rec["hidden"] = strip_slot0(s.weights.hidden);
  rec["labels"] = s.labels;
  json means = json::array();
  json covs = json::array();
  for (const auto& atom : s.atoms) {
    const Eigen::VectorXd& mu = atom.mean();
    const Eigen::MatrixXd& cov = atom.covariance();
    std::vector<double> m(mu.data(), mu.data() + mu.size());
    std::vector<double> c;
    c.reserve(static_cast<std::size_t>(cov.size()));
    for (long r = 0; r < cov.rows(); ++r)
      for (long col = 0; col < cov.cols(); ++col) c.push_back(cov(r, col));
    means.push_back(m);
    covs.push_back(c);
  }
  rec["atom_means"] = means;
  rec["atom_covs"] = covs;
  rec["loglik"] = s.loglik;
  return rec;
}

ChainState sample_from_json(const json& rec, const ChainFileMeta& meta) {
  ChainState s;
  int n = meta.nodes;
  auto pad = [&](const json& arr, auto& out) {
    using Elem = typename std::decay_t<decltype(out)>::value_type;
    out.assign(1, Elem{});
    for (const auto& item : arr) out.push_back(item.template get<Elem>());
    if (static_cast<int>(out.size()) != n + 1)
      fail(Errc::SchemaMismatch, "node array length mismatch in sample record");
  };
  pad(rec.at("alpha"), s.alpha);
  pad(rec.at("beta"), s.weights.beta);
  pad(rec.at("hidden"), s.weights.hidden);
  s.weights.L = meta.L;
  s.weights.parent_mix.assign(static_cast<std::size_t>(n) + 1, {});
  s.labels = rec.at("labels").get<std::vector<std::vector<int>>>();
  if (s.labels.size() != meta.group_nodes.size())
    fail(Errc::SchemaMismatch, "label group count mismatch in sample record");

  const json& means = rec.at("atom_means");
  const json& covs = rec.at("atom_covs");
  if (means.size() != static_cast<std::size_t>(meta.L) || covs.size() != means.size())
    fail(Errc::SchemaMismatch, "atom count differs from truncation level");
  int d = meta.dim;
  for (std::size_t l = 0; l < means.size(); ++l) {
    auto mv = means[l].get<std::vector<double>>();
    auto cv = covs[l].get<std::vector<double>>();
    if (static_cast<int>(mv.size()) != d ||
        static_cast<int>(cv.size()) != d * d)
      fail(Errc::SchemaMismatch, "atom dimension mismatch in sample record");
    Eigen::VectorXd mu = Eigen::Map<Eigen::VectorXd>(mv.data(), d);
    Eigen::MatrixXd cov(d, d);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) cov(r, c) = cv[static_cast<std::size_t>(r * d + c)];
    s.atoms.emplace_back(mu, cov);
  }

  s.counts.assign(static_cast<std::size_t>(n) + 1,
                  std::vector<int>(static_cast<std::size_t>(meta.L), 0));
  for (std::size_t g = 0; g < s.labels.size(); ++g) {
    auto& row = s.counts[static_cast<std::size_t>(meta.group_nodes[g])];
    for (int z : s.labels[g]) {
      if (z < 0 || z >= meta.L)
        fail(Errc::SchemaMismatch, "label outside component range");
      ++row[static_cast<std::size_t>(z)];
    }
  }
  s.loglik = rec.at("loglik").get<double>();
  refresh_log_weights(s);
  return s;
}

}  // namespace

void write_chain_file(const std::string& path, const ChainFileMeta& meta,
                      const std::vector<ChainSamples>& chains) {
  std::ofstream out(path);
  if (!out) fail(Errc::IoFailure, "cannot open " + path + " for writing");

  json header;
  header["record"] = "header";
  header["format"] = "gdp-chain";
  header["version"] = meta.version;
  header["L"] = meta.L;
  header["dim"] = meta.dim;
  header["nodes"] = meta.nodes;
  header["root"] = meta.root;
  header["hidden_root"] = meta.hidden_root;
  header["group_nodes"] = meta.group_nodes;
  header["group_sizes"] = meta.group_sizes;
  header["layers"] = strip_slot0(meta.layers);
  header["schedule"] = schedule_to_json(meta.schedule);
  out << header.dump() << '\n';

  for (std::size_t c = 0; c < chains.size(); ++c) {
    const ChainSamples& cs = chains[c];
    json rec;
    rec["record"] = "chain";
    rec["chain"] = c;
    rec["seed"] = cs.schedule.seed;
    json hidden_rates = json::array();
    for (auto [node, level, rate] : cs.accept.hidden)
      hidden_rates.push_back(json::array({node, level, rate}));
    json alpha_rates = json::array();
    for (auto [node, rate] : cs.accept.alpha)
      alpha_rates.push_back(json::array({node, rate}));
    rec["accept"] = json{{"root_beta", cs.accept.root_beta},
                         {"hidden", hidden_rates},
                         {"alpha", alpha_rates}};
    rec["trace"] = cs.loglik_trace;
    out << rec.dump() << '\n';
    for (std::size_t i = 0; i < cs.samples.size(); ++i)
      out << sample_to_json(cs.samples[i], static_cast<int>(c),
                            static_cast<long>(i))
                 .dump()
          << '\n';
  }
  out.flush();
  if (!out) fail(Errc::IoFailure, "write to " + path + " failed");
}

ChainFile read_chain_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::IoFailure, "cannot open " + path);

  ChainFile file;
  std::string line;
  bool saw_header = false;
  int current_chain = -1;
  long line_no = 0;
  try {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      json rec = json::parse(line);
      std::string kind = rec.at("record").get<std::string>();
      if (!saw_header) {
        if (kind != "header")
          fail(Errc::SchemaMismatch, "first record must be the header");
        if (rec.at("format").get<std::string>() != "gdp-chain")
          fail(Errc::SchemaMismatch, "unrecognized chain file format");
        if (rec.at("version").get<int>() != 1)
          fail(Errc::SchemaMismatch, "unsupported chain file version");
        file.meta.version = 1;
        file.meta.L = rec.at("L").get<int>();
        file.meta.dim = rec.at("dim").get<int>();
        file.meta.nodes = rec.at("nodes").get<int>();
        file.meta.root = rec.at("root").get<int>();
        file.meta.hidden_root = rec.at("hidden_root").get<bool>();
        file.meta.group_nodes = rec.at("group_nodes").get<std::vector<int>>();
        file.meta.group_sizes = rec.at("group_sizes").get<std::vector<long>>();
        file.meta.layers.assign(1, 0);
        for (int v : rec.at("layers").get<std::vector<int>>())
          file.meta.layers.push_back(v);
        file.meta.schedule = schedule_from_json(rec.at("schedule"));
        saw_header = true;
      } else if (kind == "chain") {
        int c = rec.at("chain").get<int>();
        if (c != current_chain + 1)
          fail(Errc::SchemaMismatch, "chain records out of order");
        current_chain = c;
        ChainSamples cs;
        cs.schedule = file.meta.schedule;
        cs.schedule.seed = rec.at("seed").get<std::uint64_t>();
        const json& acc = rec.at("accept");
        cs.accept.root_beta = acc.at("root_beta").get<double>();
        for (const auto& h : acc.at("hidden"))
          cs.accept.hidden.emplace_back(h.at(0).get<int>(), h.at(1).get<int>(),
                                        h.at(2).get<double>());
        for (const auto& a : acc.at("alpha"))
          cs.accept.alpha.emplace_back(a.at(0).get<int>(), a.at(1).get<double>());
        cs.loglik_trace = rec.at("trace").get<std::vector<double>>();
        file.chains.push_back(std::move(cs));
      } else if (kind == "sample") {
        if (current_chain < 0)
          fail(Errc::SchemaMismatch, "sample record before any chain record");
        if (rec.at("chain").get<int>() != current_chain)
          fail(Errc::SchemaMismatch, "sample record attached to wrong chain");
        file.chains.back().samples.push_back(sample_from_json(rec, file.meta));
      } else {
        fail(Errc::SchemaMismatch, "unknown record type '" + kind + "'");
      }
    }
  } catch (const json::exception& e) {
    fail(Errc::SchemaMismatch,
         path + " line " + std::to_string(line_no) + ": " + e.what());
  }
  if (!saw_header) fail(Errc::SchemaMismatch, path + " has no header record");
  return file;
}

}  // namespace gdp
