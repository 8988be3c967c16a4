// gssl: generate benchmark data, run experiments, plot predictions.
//
//   gssl gen two-moons --n 200 --noise 0.05 --labels-per-class 1 --seed 7 -o moons.csv
//   gssl gen blobs --n 300 --center 0,0 --center 4,4 --stddev 0.5 -o blobs.csv
//   gssl run --config cfg.json [-o report.json]
//   gssl plot --predictions preds.csv -o scatter.svg
//
// Exit codes: 0 success, 1 configuration error, 2 algorithm failure.

#include "gssl/bench.hpp"
#include "gssl/error.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kAlgorithmError = 2;

gssl::Matrix parse_centers(const std::vector<std::string>& specs) {
  std::vector<std::vector<double>> rows;
  for (const auto& s : specs) {
    std::vector<double> row;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && row.size() != rows.front().size())
      throw gssl::InvalidParameter("all --center values must have the same dimension");
    rows.push_back(std::move(row));
  }
  if (rows.empty() || rows.front().empty()) throw gssl::InvalidParameter("at least one --center is required");
  gssl::Matrix m(static_cast<gssl::Index>(rows.size()), static_cast<gssl::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<gssl::Index>(i), static_cast<gssl::Index>(j)) = rows[i][j];
  return m;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw gssl::Error("cannot open " + path + " for writing");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph-based semi-supervised learning benchmarks"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset as CSV");
  std::string kind;
  long n = 200;
  double noise = 0.05;
  double stddev = 0.5;
  long labels_per_class = 1;
  unsigned long long seed = 0;
  std::vector<std::string> centers;
  std::string gen_out;
  gen->add_option("kind", kind, "two-moons or blobs")->required()->check(CLI::IsMember({"two-moons", "blobs"}));
  gen->add_option("--n", n, "number of samples");
  gen->add_option("--noise", noise, "two-moons noise standard deviation");
  gen->add_option("--stddev", stddev, "blob standard deviation");
  gen->add_option("--center", centers, "blob center as comma-separated coordinates (repeatable)");
  gen->add_option("--labels-per-class", labels_per_class, "revealed labels per class");
  gen->add_option("--seed", seed, "random seed");
  gen->add_option("-o,--output", gen_out, "output CSV path")->required();

  auto* run = app.add_subcommand("run", "Run an experiment configuration");
  std::string config_path;
  std::string report_out;
  run->add_option("--config", config_path, "experiment configuration (JSON)")->required();
  run->add_option("-o,--output", report_out, "report path (overrides output.report)");

  auto* plot = app.add_subcommand("plot", "Scatter plot of a predictions CSV");
  std::string predictions;
  std::string plot_out;
  plot->add_option("--predictions", predictions, "predictions CSV from run")->required();
  plot->add_option("-o,--output", plot_out, "output .svg or .csv")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfigError;
  }

  try {
    if (*gen) {
      if (kind == "two-moons")
        gssl::save_csv(gssl::gen_two_moons(n, noise, labels_per_class, seed), gen_out);
      else
        gssl::save_csv(gssl::gen_blobs(n, parse_centers(centers), stddev, labels_per_class, seed), gen_out);
      return kOk;
    }
    if (*run) {
      std::ifstream in(config_path);
      if (!in) throw gssl::InvalidParameter("cannot open config " + config_path);
      std::stringstream ss;
      ss << in.rdbuf();
      const std::string text = ss.str();
      const auto base = std::filesystem::path(config_path).parent_path();
      const gssl::ExperimentReport report = gssl::run_experiment(text, base.empty() ? "." : base);

      std::string report_path = report_out;
      std::string predictions_path;
      const auto cfg = nlohmann::json::parse(text);
      if (cfg.contains("output")) {
        const auto& o = cfg["output"];
        if (report_path.empty() && o.contains("report")) report_path = o["report"].get<std::string>();
        if (o.contains("predictions")) predictions_path = o["predictions"].get<std::string>();
      }
      const std::string json = gssl::report_json(report);
      if (report_path.empty())
        std::cout << json;
      else
        write_text(report_path, json);
      if (!predictions_path.empty()) write_text(predictions_path, gssl::predictions_csv(report));

      for (const auto& a : report.algorithms)
        if (!a.ok) std::cerr << "algorithm " << a.name << " failed: " << a.error << '\n';
      return report.any_failed() ? kAlgorithmError : kOk;
    }
    if (*plot) {
      gssl::plot_predictions(predictions, plot_out);
      return kOk;
    }
  } catch (const gssl::InvalidParameter& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const gssl::ParseError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kAlgorithmError;
  }
  return kOk;
}
