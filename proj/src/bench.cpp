#include "gssl/bench.hpp"

#include "gssl/deformed.hpp"
#include "gssl/error.hpp"
#include "gssl/fast_taylor.hpp"
#include "gssl/graph.hpp"
#include "gssl/mknn.hpp"
#include "gssl/pdl.hpp"
#include "gssl/propagation.hpp"
#include "gssl/random.hpp"
#include "gssl/tllt.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace gssl {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Rng

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw InvalidParameter("below(0) is empty");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % n;
}

// ---------------------------------------------------------------------------
// generators

namespace {

std::vector<Label> reveal_labels(const std::vector<int>& truth, int num_classes, Index per_class, Rng& rng) {
  std::vector<Label> labels(truth.size());
  for (int c = 0; c < num_classes; ++c) {
    std::vector<Index> members;
    for (std::size_t i = 0; i < truth.size(); ++i)
      if (truth[i] == c) members.push_back(static_cast<Index>(i));
    if (members.empty()) continue;
    if (per_class > static_cast<Index>(members.size()))
      throw InvalidParameter("labels_per_class = " + std::to_string(per_class) + " exceeds the " +
                             std::to_string(members.size()) + " samples of class " + std::to_string(c));
    // partial Fisher-Yates
    for (Index r = 0; r < per_class; ++r) {
      const auto remaining = static_cast<std::uint64_t>(members.size()) - static_cast<std::uint64_t>(r);
      const Index pick = r + static_cast<Index>(rng.below(remaining));
      std::swap(members[static_cast<std::size_t>(r)], members[static_cast<std::size_t>(pick)]);
      labels[static_cast<std::size_t>(members[static_cast<std::size_t>(r)])] = c;
    }
  }
  return labels;
}

}  // namespace

Dataset gen_two_moons(Index n, double noise, Index labels_per_class, std::uint64_t seed) {
  if (n < 2 || n % 2 != 0) throw InvalidParameter("two-moons needs an even n >= 2");
  if (!(noise >= 0.0)) throw InvalidParameter("noise must be nonnegative");
  if (labels_per_class < 1) throw InvalidParameter("labels_per_class must be at least 1");
  if (labels_per_class > n / 2) throw InvalidParameter("labels_per_class exceeds n / 2");
  const Index half = n / 2;
  Matrix x(n, 2);
  std::vector<int> truth(static_cast<std::size_t>(n));
  for (Index i = 0; i < half; ++i) {
    const double t = half > 1 ? std::numbers::pi * static_cast<double>(i) / static_cast<double>(half - 1) : 0.0;
    x(i, 0) = std::cos(t);
    x(i, 1) = std::sin(t);
    x(half + i, 0) = 1.0 - std::cos(t);
    x(half + i, 1) = 0.5 - std::sin(t);
    truth[static_cast<std::size_t>(i)] = 0;
    truth[static_cast<std::size_t>(half + i)] = 1;
  }
  Rng rng(seed);
  if (noise > 0.0)
    for (Index i = 0; i < n; ++i)
      for (Index d = 0; d < 2; ++d) x(i, d) += noise * rng.normal();
  auto labels = reveal_labels(truth, 2, labels_per_class, rng);
  return Dataset(std::move(x), std::move(labels), 2, std::move(truth));
}

Dataset gen_blobs(Index n, const Matrix& centers, double stddev, Index labels_per_class, std::uint64_t seed) {
  if (centers.rows() < 1 || centers.cols() < 1) throw InvalidParameter("blobs need at least one center");
  if (n < centers.rows()) throw InvalidParameter("blobs need at least one sample per center");
  if (!(stddev >= 0.0)) throw InvalidParameter("stddev must be nonnegative");
  if (labels_per_class < 1) throw InvalidParameter("labels_per_class must be at least 1");
  const Index k = centers.rows();
  Matrix x(n, centers.cols());
  std::vector<int> truth(static_cast<std::size_t>(n));
  Rng rng(seed);
  for (Index i = 0; i < n; ++i) {
    const Index c = i % k;
    truth[static_cast<std::size_t>(i)] = static_cast<int>(c);
    for (Index d = 0; d < centers.cols(); ++d) {
      const double z = rng.normal();
      x(i, d) = centers(c, d) + stddev * z;
    }
  }
  const int classes = static_cast<int>(std::max<Index>(2, k));
  auto labels = reveal_labels(truth, classes, labels_per_class, rng);
  return Dataset(std::move(x), std::move(labels), classes, std::move(truth));
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw Error("cannot format number");
  return std::string(buf, end);
}

std::string trim(std::string_view s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r')) ++a;
  while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
  return std::string(s.substr(a, b - a));
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(trim(std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

bool parse_int(const std::string& s, long& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

Dataset read_csv(std::istream& in, std::optional<int> num_classes) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_row(line);
      break;
    }
  }
  if (header.empty()) throw ParseError("CSV is empty: missing header row");
  bool has_truth = false;
  if (header.size() >= 3 && header.back() == "truth" && header[header.size() - 2] == "label")
    has_truth = true;
  else if (header.back() != "label")
    throw ParseError("line " + std::to_string(line_no) + ": header must end with 'label' (or 'label,truth')");
  const std::size_t label_col = header.size() - (has_truth ? 2 : 1);
  const std::size_t d = label_col;
  if (d < 1) throw ParseError("line " + std::to_string(line_no) + ": header has no feature columns");

  std::vector<double> values;
  std::vector<Label> labels;
  std::vector<int> truth;
  int max_class = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_row(line);
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (cells.size() != header.size())
      throw ParseError(where + "expected " + std::to_string(header.size()) + " fields, found " +
                       std::to_string(cells.size()));
    for (std::size_t c = 0; c < d; ++c) {
      double v = 0.0;
      if (!parse_double(cells[c], v)) throw ParseError(where + "non-numeric feature '" + cells[c] + "'");
      values.push_back(v);
    }
    const std::string& lab = cells[label_col];
    if (lab.empty() || lab == "?") {
      labels.emplace_back(std::nullopt);
    } else {
      long v = 0;
      if (!parse_int(lab, v)) throw ParseError(where + "label '" + lab + "' is not an integer");
      if (v < 0) throw ParseError(where + "negative class id " + lab);
      labels.emplace_back(static_cast<int>(v));
      max_class = std::max(max_class, static_cast<int>(v));
    }
    if (has_truth) {
      long v = 0;
      if (!parse_int(cells.back(), v) || v < 0)
        throw ParseError(where + "truth '" + cells.back() + "' is not a nonnegative integer");
      truth.push_back(static_cast<int>(v));
      max_class = std::max(max_class, static_cast<int>(v));
    }
  }
  if (labels.empty()) throw ParseError("CSV has a header but no samples");
  const Index n = static_cast<Index>(labels.size());
  Matrix x(n, static_cast<Index>(d));
  for (Index i = 0; i < n; ++i)
    for (Index c = 0; c < static_cast<Index>(d); ++c) x(i, c) = values[static_cast<std::size_t>(i) * d + static_cast<std::size_t>(c)];
  const int classes = num_classes.value_or(std::max(2, max_class + 1));
  if (max_class >= classes)
    throw ParseError("class id " + std::to_string(max_class) + " exceeds declared class count " +
                     std::to_string(classes));
  return Dataset(std::move(x), std::move(labels), classes, std::move(truth));
}

Dataset load_csv(const std::filesystem::path& path, std::optional<int> num_classes) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return read_csv(in, num_classes);
}

void write_csv(const Dataset& data, std::ostream& out) {
  for (Index c = 0; c < data.dim(); ++c) out << 'f' << (c + 1) << ',';
  out << "label";
  if (data.has_truth()) out << ",truth";
  out << '\n';
  for (Index i = 0; i < data.size(); ++i) {
    for (Index c = 0; c < data.dim(); ++c) out << format_double(data.features()(i, c)) << ',';
    if (auto l = data.labels()[static_cast<std::size_t>(i)])
      out << *l;
    else
      out << '?';
    if (data.has_truth()) out << ',' << data.truth()[static_cast<std::size_t>(i)];
    out << '\n';
  }
}

void save_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_csv(data, out);
}

double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth, const std::vector<bool>& mask) {
  if (predicted.size() != truth.size() || predicted.size() != mask.size())
    throw InvalidParameter("accuracy: predicted, truth and mask lengths differ");
  std::size_t total = 0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    ++total;
    hits += predicted[i] == truth[i];
  }
  return total ? static_cast<double>(hits) / static_cast<double>(total) : 0.0;
}

// ---------------------------------------------------------------------------
// experiments

namespace {

std::string fnv1a_hex(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Reads typed parameters from a JSON object and rejects unknown keys.
class Params {
 public:
  Params(const json& obj, std::string context) : obj_(obj), context_(std::move(context)) {
    if (!obj_.is_object()) throw InvalidParameter(context_ + " must be a JSON object");
  }

  double number(const std::string& key, double fallback) {
    used_.insert(key);
    if (!obj_.contains(key)) return fallback;
    if (!obj_[key].is_number()) throw InvalidParameter(context_ + "." + key + " must be a number");
    return obj_[key].get<double>();
  }

  Index integer(const std::string& key, Index fallback) {
    used_.insert(key);
    if (!obj_.contains(key)) return fallback;
    if (!obj_[key].is_number_integer()) throw InvalidParameter(context_ + "." + key + " must be an integer");
    return obj_[key].get<Index>();
  }

  bool boolean(const std::string& key, bool fallback) {
    used_.insert(key);
    if (!obj_.contains(key)) return fallback;
    if (!obj_[key].is_boolean()) throw InvalidParameter(context_ + "." + key + " must be a boolean");
    return obj_[key].get<bool>();
  }

  std::string string(const std::string& key) {
    used_.insert(key);
    if (!obj_.contains(key) || !obj_[key].is_string())
      throw InvalidParameter(context_ + "." + key + " must be a string");
    return obj_[key].get<std::string>();
  }

  const json* raw(const std::string& key) {
    used_.insert(key);
    return obj_.contains(key) ? &obj_[key] : nullptr;
  }

  void finish() const {
    for (const auto& [key, value] : obj_.items())
      if (!used_.count(key)) throw InvalidParameter(context_ + ": unknown key '" + key + "'");
  }

 private:
  const json& obj_;
  std::string context_;
  std::set<std::string> used_;
};

Dataset dataset_from_config(const json& spec, std::uint64_t seed, const std::filesystem::path& base) {
  Params p(spec, "dataset");
  const std::string type = p.string("type");
  std::optional<Dataset> data;
  if (type == "two-moons") {
    const Index n = p.integer("n", 200);
    const double noise = p.number("noise", 0.05);
    const Index lpc = p.integer("labels_per_class", 1);
    data = gen_two_moons(n, noise, lpc, seed);
  } else if (type == "blobs") {
    const Index n = p.integer("n", 200);
    const double stddev = p.number("stddev", 0.5);
    const Index lpc = p.integer("labels_per_class", 1);
    const json* c = p.raw("centers");
    if (!c || !c->is_array() || c->empty() || !(*c)[0].is_array())
      throw InvalidParameter("dataset.centers must be a nonempty array of coordinate arrays");
    Matrix centers(static_cast<Index>(c->size()), static_cast<Index>((*c)[0].size()));
    for (std::size_t i = 0; i < c->size(); ++i) {
      if (!(*c)[i].is_array() || (*c)[i].size() != (*c)[0].size())
        throw InvalidParameter("dataset.centers rows must share one dimension");
      for (std::size_t d = 0; d < (*c)[i].size(); ++d)
        centers(static_cast<Index>(i), static_cast<Index>(d)) = (*c)[i][d].get<double>();
    }
    data = gen_blobs(n, centers, stddev, lpc, seed);
  } else if (type == "csv") {
    std::filesystem::path path = p.string("path");
    if (path.is_relative()) path = base / path;
    const Index classes = p.integer("num_classes", 0);
    data = load_csv(path, classes > 0 ? std::optional<int>(static_cast<int>(classes)) : std::nullopt);
  } else {
    throw InvalidParameter("dataset.type must be 'two-moons', 'blobs' or 'csv', got '" + type + "'");
  }
  p.finish();
  return *std::move(data);
}

using Runner = std::function<PropagationResult(const Dataset&, const Graph&, double sigma)>;

Runner make_runner(const json& spec, Index graph_k) {
  Params p(spec, "algorithm");
  const std::string name = p.string("name");
  Runner run;
  if (name == "lgc") {
    const double alpha = p.number("alpha", 0.99);
    run = [alpha](const Dataset& d, const Graph& g, double) { return lgc_closed(g, one_hot_seeds(d), alpha); };
  } else if (name == "lgc_iterative") {
    PropagationConfig cfg;
    cfg.alpha = p.number("alpha", cfg.alpha);
    cfg.tolerance = p.number("tolerance", cfg.tolerance);
    cfg.max_iterations = static_cast<int>(p.integer("max_iterations", cfg.max_iterations));
    cfg.validate();
    run = [cfg](const Dataset& d, const Graph& g, double) { return lgc_iterate(g, one_hot_seeds(d), cfg); };
  } else if (name == "gfhf") {
    run = [](const Dataset& d, const Graph& g, double) { return gfhf(g, d); };
  } else if (name == "fast_lgc") {
    const double alpha = p.number("alpha", 0.99);
    const double scale = p.number("sigma_scale", 4.0);
    const double fixed = p.number("sigma", 0.0);
    run = [=](const Dataset& d, const Graph&, double sigma) {
      return fast_lgc(d, one_hot_seeds(d), alpha, fixed > 0.0 ? fixed : scale * sigma);
    };
  } else if (name == "flap") {
    const double alpha = p.number("alpha", 0.99);
    const double gamma = p.number("gamma", 1.0);
    const bool iterative = p.boolean("iterative", false);
    PropagationConfig cfg;
    cfg.alpha = alpha;
    cfg.tolerance = p.number("tolerance", cfg.tolerance);
    run = [=](const Dataset& d, const Graph& g, double) {
      return iterative ? flap_iterate(g, d, cfg, gamma) : flap_closed(g, d, alpha, gamma);
    };
  } else if (name == "mknn") {
    const double alpha = p.number("alpha", 0.99);
    const Index k = p.integer("k", 3);
    run = [=](const Dataset& d, const Graph& g, double) {
      const Graph constrained = apply_constraints(g, constraints_from_labels(d));
      return mknn_classify(fatigue_similarity(constrained, alpha), d, k);
    };
  } else if (name == "deformed") {
    DeformedConfig cfg;
    cfg.beta = p.number("beta", cfg.beta);
    cfg.gamma = p.number("gamma", cfg.gamma);
    run = [cfg](const Dataset& d, const Graph& g, double) { return deformed_transductive(g, d, cfg); };
  } else if (name == "pdl") {
    PdlOptions opt;
    opt.gamma = p.number("gamma", opt.gamma);
    opt.posterior.alpha = p.number("alpha", opt.posterior.alpha);
    opt.robust = p.boolean("robust", opt.robust);
    opt.posterior.k = graph_k;
    run = [opt](const Dataset& d, const Graph&, double sigma) mutable {
      opt.posterior.sigma = sigma;
      const PdlFit fit = train_pdl(d, opt);
      return make_result(predict_posteriors(fit.model, d.features()));
    };
  } else if (name == "tllt") {
    TeacherConfig cfg;
    cfg.gamma_fb = p.number("gamma_fb", cfg.gamma_fb);
    cfg.epsilon_gmrf = p.number("epsilon", cfg.epsilon_gmrf);
    cfg.s_initial = p.integer("s_initial", cfg.s_initial);
    cfg.validate();
    run = [cfg](const Dataset& d, const Graph& g, double) { return tllt_run(d, g, cfg).result; };
  } else {
    throw InvalidParameter("unknown algorithm '" + name + "'");
  }
  p.finish();
  return run;
}

json environment_json() {
  json env;
  env["library"] = "gssl 0.1.0";
#if defined(__clang__)
  env["compiler"] = std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
  env["compiler"] = std::string("gcc ") + __VERSION__;
#else
  env["compiler"] = "unknown";
#endif
  env["rng"] = "mt19937_64 + Box-Muller";
  return env;
}

}  // namespace

bool ExperimentReport::any_failed() const {
  return std::any_of(algorithms.begin(), algorithms.end(), [](const auto& a) { return !a.ok; });
}

ExperimentReport run_experiment(std::string_view config_json, const std::filesystem::path& base_dir) {
  json cfg;
  try {
    cfg = json::parse(config_json);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  if (!cfg.is_object()) throw InvalidParameter("config must be a JSON object");

  ExperimentReport report;
  std::vector<std::pair<std::string, Runner>> runners;
  Index k = 10;
  std::optional<double> sigma;
  try {
    Params top(cfg, "config");
    const auto seed = static_cast<std::uint64_t>(top.integer("seed", 0));
    const json* ds = top.raw("dataset");
    if (!ds) throw InvalidParameter("config.dataset is required");
    report.data = dataset_from_config(*ds, seed, base_dir);

    if (const json* gspec = top.raw("graph")) {
      Params gp(*gspec, "graph");
      k = gp.integer("k", k);
      if (const json* s = gp.raw("sigma")) {
        if (s->is_number())
          sigma = s->get<double>();
        else if (!(s->is_string() && s->get<std::string>() == "auto"))
          throw InvalidParameter("graph.sigma must be a number or \"auto\"");
      }
      gp.finish();
    }
    if (const json* algos = top.raw("algorithms")) {
      if (!algos->is_array()) throw InvalidParameter("config.algorithms must be an array");
      for (const auto& a : *algos) runners.emplace_back(a.value("name", std::string()), make_runner(a, k));
    }
    top.raw("output");  // consumed by the command-line tool
    top.finish();
  } catch (const json::exception& e) {
    throw InvalidParameter(std::string("config: ") + e.what());
  }

  const Dataset& data = *report.data;
  report.config_digest = fnv1a_hex(cfg.dump());
  report.num_samples = data.size();
  report.num_labeled = static_cast<Index>(data.labeled_indices().size());
  if (runners.empty()) return report;

  report.sigma = sigma ? *sigma : auto_sigma(data.features(), k);
  const Graph graph = build_knn_graph(data, k, report.sigma);

  std::vector<bool> mask(static_cast<std::size_t>(data.size()));
  for (Index i = 0; i < data.size(); ++i) mask[static_cast<std::size_t>(i)] = !data.is_labeled(i);

  for (const auto& [name, run] : runners) {
    AlgorithmOutcome out;
    out.name = name;
    const auto start = std::chrono::steady_clock::now();
    try {
      PropagationResult r = run(data, graph, report.sigma);
      out.iterations = r.iterations;
      out.converged = r.converged;
      out.predicted = std::move(r.predicted);
      if (data.has_truth()) out.accuracy = accuracy(out.predicted, data.truth(), mask);
    } catch (const std::exception& e) {
      out.ok = false;
      out.error = e.what();
    }
    out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    report.algorithms.push_back(std::move(out));
  }
  return report;
}

std::string report_json(const ExperimentReport& report, bool include_timing) {
  json doc;
  doc["config_digest"] = report.config_digest;
  doc["environment"] = environment_json();
  json ds;
  ds["samples"] = report.num_samples;
  ds["labeled"] = report.num_labeled;
  if (report.data) {
    ds["classes"] = report.data->num_classes();
    ds["dimension"] = report.data->dim();
    ds["has_truth"] = report.data->has_truth();
  }
  doc["dataset"] = std::move(ds);
  doc["sigma"] = report.sigma;
  json algos = json::array();
  for (const auto& a : report.algorithms) {
    json j;
    j["name"] = a.name;
    j["ok"] = a.ok;
    if (a.ok) {
      if (report.data && report.data->has_truth())
        j["accuracy"] = a.accuracy;
      else
        j["accuracy"] = nullptr;
      j["iterations"] = a.iterations;
      j["converged"] = a.converged;
    } else {
      j["error"] = a.error;
    }
    if (include_timing) j["wall_ms"] = a.wall_ms;
    algos.push_back(std::move(j));
  }
  doc["algorithms"] = std::move(algos);
  return doc.dump(2) + "\n";
}

std::string predictions_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "x,y,true,predicted,algorithm\n";
  if (!report.data) return out.str();
  const Dataset& d = *report.data;
  for (const auto& a : report.algorithms) {
    if (!a.ok) continue;
    for (Index i = 0; i < d.size(); ++i) {
      out << format_double(d.features()(i, 0)) << ','
          << (d.dim() > 1 ? format_double(d.features()(i, 1)) : std::string("0")) << ',';
      if (d.has_truth()) out << d.truth()[static_cast<std::size_t>(i)];
      out << ',' << a.predicted[static_cast<std::size_t>(i)] << ',' << a.name << '\n';
    }
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// plotting

namespace {

struct PlotPoint {
  double x;
  double y;
  std::optional<int> truth;
  int predicted;
};

std::map<std::string, std::vector<PlotPoint>> read_predictions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError("predictions file is empty");
  ++line_no;
  if (trim(line) != "x,y,true,predicted,algorithm")
    throw ParseError("line 1: expected header 'x,y,true,predicted,algorithm'");
  std::map<std::string, std::vector<PlotPoint>> panels;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_row(line);
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (cells.size() != 5) throw ParseError(where + "expected 5 fields");
    PlotPoint p{};
    long v = 0;
    if (!parse_double(cells[0], p.x) || !parse_double(cells[1], p.y)) throw ParseError(where + "bad coordinate");
    if (!cells[2].empty()) {
      if (!parse_int(cells[2], v)) throw ParseError(where + "bad true class");
      p.truth = static_cast<int>(v);
    }
    if (!parse_int(cells[3], v)) throw ParseError(where + "bad predicted class");
    p.predicted = static_cast<int>(v);
    panels[cells[4]].push_back(p);
  }
  return panels;
}

const char* palette(int c) {
  static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                 "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  return colors[static_cast<std::size_t>(std::abs(c)) % 10];
}

}  // namespace

void plot_predictions(const std::filesystem::path& predictions, const std::filesystem::path& output) {
  const auto panels = read_predictions(predictions);
  const std::string ext = output.extension().string();
  std::ofstream out(output);
  if (!out) throw Error("cannot open " + output.string() + " for writing");

  if (ext == ".csv") {
    // one block per (algorithm, predicted class), ready for per-series scatter plotting
    out << "algorithm,predicted,x,y,correct\n";
    for (const auto& [name, pts] : panels) {
      std::map<int, std::vector<const PlotPoint*>> by_class;
      for (const auto& p : pts) by_class[p.predicted].push_back(&p);
      for (const auto& [cls, members] : by_class)
        for (const PlotPoint* p : members)
          out << name << ',' << cls << ',' << format_double(p->x) << ',' << format_double(p->y) << ','
              << (p->truth ? (*p->truth == p->predicted ? "1" : "0") : "") << '\n';
    }
    return;
  }
  if (ext != ".svg") throw InvalidParameter("plot output must end in .svg or .csv");

  constexpr double kPanel = 320.0;
  constexpr double kMargin = 24.0;
  const double width = std::max<std::size_t>(1, panels.size()) * (kPanel + kMargin) + kMargin;
  const double height = kPanel + 2 * kMargin + 16;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::size_t col = 0;
  for (const auto& [name, pts] : panels) {
    double x0 = pts.front().x, x1 = x0, y0 = pts.front().y, y1 = y0;
    for (const auto& p : pts) {
      x0 = std::min(x0, p.x);
      x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.y);
      y1 = std::max(y1, p.y);
    }
    const double sx = x1 > x0 ? (kPanel - 10) / (x1 - x0) : 1.0;
    const double sy = y1 > y0 ? (kPanel - 10) / (y1 - y0) : 1.0;
    const double ox = kMargin + static_cast<double>(col) * (kPanel + kMargin);
    const double oy = kMargin + 16;
    out << "<g>\n<text x=\"" << ox << "\" y=\"" << kMargin << "\" font-family=\"sans-serif\" font-size=\"14\">"
        << name << "</text>\n";
    out << "<rect x=\"" << ox << "\" y=\"" << oy << "\" width=\"" << kPanel << "\" height=\"" << kPanel
        << "\" fill=\"none\" stroke=\"#ccc\"/>\n";
    for (const auto& p : pts) {
      const double px = ox + 5 + (p.x - x0) * sx;
      const double py = oy + kPanel - 5 - (p.y - y0) * sy;
      const bool wrong = p.truth && *p.truth != p.predicted;
      out << "<circle cx=\"" << px << "\" cy=\"" << py << "\" r=\"3\" fill=\"" << palette(p.predicted) << '"'
          << (wrong ? " stroke=\"black\" stroke-width=\"1.5\"" : "") << "/>\n";
    }
    out << "</g>\n";
    ++col;
  }
  out << "</svg>\n";
}

}  // namespace gssl
