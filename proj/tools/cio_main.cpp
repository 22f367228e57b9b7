#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cio/contact_solver.hpp"
#include "cio/errors.hpp"
#include "cio/simulator.hpp"
#include "cio/validation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int log_level() {
  const char* env = std::getenv("CIO_LOG_LEVEL");
  if (!env) return 1;  // warn
  const std::string v(env);
  if (v == "error") return 0;
  if (v == "warn") return 1;
  if (v == "info") return 2;
  if (v == "debug") return 3;
  return 1;
}

void log_info(const std::string& msg) {
  if (log_level() >= 2) std::cerr << "[info] " << msg << "\n";
}

struct RunOverrides {
  std::optional<uint64_t> seed;
  std::optional<double> duration;
  std::optional<std::string> mode;
  bool no_cio = false;
};

cio::ScenarioConfig load_with_overrides(const std::string& config_path,
                                        const RunOverrides& ov) {
  std::ifstream in(config_path);
  if (!in) throw cio::ConfigError("cannot open config file: " + config_path);
  std::stringstream ss;
  ss << in.rdbuf();

  // Apply overrides on the raw json so derived seeds stay consistent.
  json j;
  try {
    j = json::parse(ss.str());
  } catch (const json::exception& e) {
    throw cio::ConfigError("failed to parse " + config_path + ": " + e.what());
  }
  if (ov.seed) j["seed"] = *ov.seed;
  if (ov.duration) j["duration"] = *ov.duration;
  if (ov.mode) j["mode"] = *ov.mode;
  if (ov.no_cio) j["filter"]["enable_contact_updates"] = false;
  return cio::parse_scenario(j.dump(), config_path);
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw cio::SimError("cannot write output file: " + path.string());
  out << content;
}

void write_run_outputs(const cio::RunLog& log, const fs::path& dir) {
  fs::create_directories(dir);
  write_file(dir / "run.jsonl", log.to_jsonl());
  write_file(dir / "metrics.json", log.metrics_text());
  write_file(dir / "traces.csv", log.to_csv());
}

int cmd_run(const std::string& config_path, const RunOverrides& ov, const std::string& out_dir,
            int batch) {
  if (batch <= 1) {
    const cio::ScenarioConfig cfg = load_with_overrides(config_path, ov);
    log_info("running scenario for " + std::to_string(cfg.duration) + " s");
    const cio::RunLog log = cio::run_scenario(cfg);
    write_run_outputs(log, out_dir);
    std::cout << log.metrics_text();
    return 0;
  }

  // Batch mode: one seeded world per worker, outputs merged in seed order.
  std::vector<cio::ScenarioConfig> cfgs;
  const uint64_t base_seed = ov.seed.value_or(load_with_overrides(config_path, ov).seed);
  for (int i = 0; i < batch; ++i) {
    RunOverrides o = ov;
    o.seed = base_seed + static_cast<uint64_t>(i);
    cfgs.push_back(load_with_overrides(config_path, o));
  }
  std::vector<cio::RunLog> logs(batch);
  std::vector<std::string> errors(batch);
  const int workers =
      std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), batch));
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < batch; i = next.fetch_add(1)) {
        try {
          logs[i] = cio::run_scenario(cfgs[i]);
        } catch (const std::exception& e) {
          errors[i] = e.what();
        }
      }
    });
  }
  for (auto& th : pool) th.join();

  json merged = json::array();
  for (int i = 0; i < batch; ++i) {
    if (!errors[i].empty()) throw cio::SimError("batch run " + std::to_string(i) + ": " + errors[i]);
    const fs::path dir = fs::path(out_dir) / ("run_" + std::to_string(cfgs[i].seed));
    write_run_outputs(logs[i], dir);
    merged.push_back(logs[i].metrics);
  }
  fs::create_directories(out_dir);
  write_file(fs::path(out_dir) / "batch_metrics.json", merged.dump(2) + "\n");
  std::cout << merged.dump(2) << "\n";
  return 0;
}

int cmd_compare(const std::string& config_path, const RunOverrides& ov,
                const std::string& out_dir) {
  cio::ScenarioConfig cfg = load_with_overrides(config_path, ov);
  cfg.comparison = true;
  const cio::RunLog log = cio::run_scenario(cfg);

  fs::create_directories(out_dir);
  write_run_outputs(log, out_dir);

  // Per-axis velocity error traces for both filters.
  std::ostringstream csv;
  csv << "t,cio_ex,cio_ey,cio_ez,cio_enorm,pred_ex,pred_ey,pred_ez,pred_enorm\n";
  char buf[256];
  double cio_max = 0.0, pred_max = 0.0;
  for (const auto& rec : log.records) {
    const cio::Vector3d ce = rec.cio_v - rec.v;
    const cio::Vector3d se = rec.shadow_v - rec.v;
    cio_max = std::max(cio_max, ce.norm());
    pred_max = std::max(pred_max, se.norm());
    std::snprintf(buf, sizeof(buf), "%.6f,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", rec.t,
                  ce.x(), ce.y(), ce.z(), ce.norm(), se.x(), se.y(), se.z(), se.norm());
    csv << buf;
  }
  write_file(fs::path(out_dir) / "compare.csv", csv.str());

  json summary;
  summary["cio_max_vel_error"] = cio_max;
  summary["prediction_only_max_vel_error"] = pred_max;
  summary["events"] = log.events.size();
  summary["metrics"] = log.metrics;
  write_file(fs::path(out_dir) / "comparison.json", summary.dump(2) + "\n");
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int cmd_solve_contacts(const std::string& input_path, const std::string& output_path,
                       const cio::VehicleParams& params) {
  std::ifstream in(input_path);
  if (!in) throw cio::ConfigError("cannot open input file: " + input_path);
  std::ostringstream out;

  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    json rec;
    try {
      const json jin = json::parse(line);
      cio::TotalWrench w;
      const auto fe = jin.at("F_e");
      const auto me = jin.at("M_e");
      for (int i = 0; i < 3; ++i) {
        w.F_e[i] = fe.at(i).get<double>();
        w.M_e[i] = me.at(i).get<double>();
      }
      w.M_w_l = jin.at("M_w_l").get<double>();
      w.M_w_r = jin.at("M_w_r").get<double>();

      const cio::ContactSolution sol = cio::estimate_contact(w, params);
      rec["ok"] = true;
      rec["f_l"] = {sol.f_l.x(), sol.f_l.y(), sol.f_l.z()};
      rec["f_r"] = {sol.f_r.x(), sol.f_r.y(), sol.f_r.z()};
      rec["p_l"] = {sol.p_l.x(), sol.p_l.y(), sol.p_l.z()};
      rec["p_r"] = {sol.p_r.x(), sol.p_r.y(), sol.p_r.z()};
    } catch (const std::exception& e) {
      rec["ok"] = false;
      rec["line"] = lineno;
      rec["error"] = e.what();
    }
    out << rec.dump() << "\n";
  }

  if (output_path.empty() || output_path == "-") {
    std::cout << out.str();
  } else {
    write_file(output_path, out.str());
  }
  return 0;
}

int cmd_validate(uint64_t seed, int instances, double perturb_contact) {
  const cio::VehicleParams params;
  const auto results = cio::validation::run_all(seed, instances, params, perturb_contact);

  bool all_pass = true;
  std::printf("%-40s %-14s %-10s %s\n", "check", "max_residual", "tolerance", "result");
  for (const auto& r : results) {
    std::printf("%-40s %-14.3e %-10.0e %s\n", r.name.c_str(), r.max_residual, r.tolerance,
                r.pass ? "PASS" : "FAIL");
    all_pass = all_pass && r.pass;
  }
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contact-aided inertial odometry simulation toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".";
  RunOverrides ov;
  uint64_t seed_flag = 0;
  double duration_flag = 0.0;
  std::string mode_flag;
  int batch = 1;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "scenario config file")->required();
    sub->add_option("--seed", seed_flag, "override master seed");
    sub->add_option("--duration", duration_flag, "override duration [s]");
    sub->add_option("--mode", mode_flag, "override mode (flying|rolling|bouncing)");
    sub->add_flag("--no-cio", ov.no_cio, "disable collision measurement updates");
    sub->add_option("--out", out_dir, "output directory");
  };

  CLI::App* run = app.add_subcommand("run", "execute a scenario and write logs");
  add_common(run);
  run->add_option("--batch", batch, "run N seeded scenarios in parallel");

  CLI::App* compare = app.add_subcommand(
      "compare", "run with a prediction-only shadow filter and report both error traces");
  add_common(compare);

  std::string solve_input, solve_output;
  CLI::App* solve = app.add_subcommand("solve-contacts",
                                       "batch contact recovery from a JSON-lines wrench file");
  solve->add_option("input", solve_input, "JSON-lines input file")->required();
  solve->add_option("--out", solve_output, "output file (default stdout)");

  uint64_t validate_seed = 12345;
  int validate_instances = 200;
  double perturb_contact = 0.0;
  CLI::App* validate =
      app.add_subcommand("validate", "run the oracle-equivalence and closed-form suites");
  validate->add_option("--seed", validate_seed, "random seed");
  validate->add_option("--instances", validate_instances, "contact-solver instances");
  validate->add_option("--perturb-contact", perturb_contact,
                       "bias the analytic solver's wheel radius (fault-injection hook)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed() || compare->parsed()) {
      const CLI::App* sub = run->parsed() ? run : compare;
      if (sub->count("--seed")) ov.seed = seed_flag;
      if (sub->count("--duration")) ov.duration = duration_flag;
      if (sub->count("--mode")) ov.mode = mode_flag;
      if (run->parsed()) return cmd_run(config_path, ov, out_dir, batch);
      return cmd_compare(config_path, ov, out_dir);
    }
    if (solve->parsed()) {
      return cmd_solve_contacts(solve_input, solve_output, cio::VehicleParams{});
    }
    if (validate->parsed()) {
      return cmd_validate(validate_seed, validate_instances, perturb_contact);
    }
  } catch (const cio::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "simulation error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
