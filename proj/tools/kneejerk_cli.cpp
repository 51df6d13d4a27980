// kneejerk: optimize | verify | discriminant | oracle

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "kneejerk/error.hpp"
#include "kneejerk/problem.hpp"

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw kj::InputError("cannot write " + path.string());
  out << contents;
}

std::string dump(const kj::json& j) { return j.dump(2) + "\n"; }

// Writes `name` under --out (if given) and echoes the JSON on stdout.
void emit(const std::string& out_dir, const std::string& name, const kj::json& j) {
  const std::string text = dump(j);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / name, text);
  }
  std::cout << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Knee-jerk mapping: monotone multiplicative ascent on products of simplices"};
  app.require_subcommand(1);

  std::string problem_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::size_t samples = 1000;
  std::size_t competitors = 1000;
  std::size_t resolution = 1000;
  bool concavity = false;
  bool inject_negative = false;
  bool serial = false;
  std::string graph_path;
  kj::ConfigOverrides overrides;

  auto add_config_flags = [&](CLI::App* sub) {
    sub->add_option("--max-iters", overrides.max_iters, "Iteration cap");
    sub->add_option("--tol-div", overrides.tol_div, "Stop when the step I-divergence is below this");
    sub->add_option("--tol-w", overrides.tol_w, "Stop when the W improvement is below this");
  };

  CLI::App* optimize = app.add_subcommand("optimize", "Iterate the knee-jerk mapping");
  optimize->add_option("--problem", problem_path, "Problem file (JSON)")->required();
  optimize->add_option("--out", out_dir, "Directory for trace.csv and summary.json");
  add_config_flags(optimize);

  CLI::App* verify = app.add_subcommand("verify", "Check certificates at random interior points");
  verify->add_option("--problem", problem_path, "Problem file (JSON)")->required();
  verify->add_option("--out", out_dir, "Directory for verify.json");
  verify->add_option("--seed", seed, "Random seed");
  verify->add_option("--samples", samples, "Number of random interior points");
  verify->add_option("--competitors", competitors, "Competitors per argmax check");
  verify->add_flag("--concavity", concavity, "Also run the log-concavity probe");
  verify->add_flag("--inject-negative", inject_negative,
                   "Run a non-knee-jerk fixture through the convexity probe (negative control)");
  verify->add_flag("--serial", serial, "Use the serial reference kernel");

  CLI::App* disc = app.add_subcommand("discriminant", "Emit the spanning-tree polynomial of a graph");
  auto* graph_opt = disc->add_option("--graph", graph_path, "Graph file (JSON)");
  auto* disc_problem = disc->add_option("--problem", problem_path, "Problem file with a graph source");
  graph_opt->excludes(disc_problem);
  disc->add_option("--out", out_dir, "Directory for polynomial.json");

  CLI::App* oracle = app.add_subcommand("oracle", "Brute-force grid maximizer");
  oracle->add_option("--problem", problem_path, "Problem file (JSON)")->required();
  oracle->add_option("--resolution", resolution, "Grid steps per block");
  oracle->add_option("--out", out_dir, "Directory for oracle.json");
  oracle->add_flag("--serial", serial, "Use the serial reference kernel");
  add_config_flags(oracle);

  CLI11_PARSE(app, argc, argv);

  try {
    const kj::Exec exec = serial ? kj::Exec::serial : kj::Exec::parallel;

    if (*optimize) {
      kj::Problem p = kj::load_problem(problem_path);
      kj::apply_overrides(p, overrides);
      const kj::OptimizeOutcome r = kj::run_optimize(p);
      if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        std::ofstream csv(fs::path(out_dir) / "trace.csv", std::ios::binary);
        kj::write_trace_csv(csv, r.trace);
      }
      emit(out_dir, "summary.json", r.summary);
      if (r.exit_code == kj::exit_degenerate) {
        std::cerr << "degenerate: " << r.summary.value("explanation", "") << "\n";
      }
      return r.exit_code;
    }

    if (*verify) {
      const kj::Problem p = kj::load_problem(problem_path);
      kj::VerifyOptions opt;
      opt.samples = samples;
      opt.seed = seed;
      opt.argmax_competitors = competitors;
      opt.concavity = concavity;
      opt.inject_negative = inject_negative;
      const kj::VerifyOutcome r = kj::run_verify(p, opt, exec);
      emit(out_dir, "verify.json", r.report);
      if (r.exit_code != kj::exit_ok) {
        std::cerr << "VERIFICATION FAILED; worst cases:\n"
                  << "  inequality: " << kj::to_json(r.summary.worst_inequality).dump() << "\n"
                  << "  argmax:     " << kj::to_json(r.summary.worst_argmax).dump() << "\n"
                  << "  convexity:  " << kj::to_json(r.summary.convexity).dump() << "\n";
        if (r.summary.concavity) {
          std::cerr << "  concavity:  " << kj::to_json(*r.summary.concavity).dump() << "\n";
        }
        if (r.summary.negative_control) {
          std::cerr << "  negative control: " << kj::to_json(*r.summary.negative_control).dump()
                    << "\n";
        }
      }
      return r.exit_code;
    }

    if (*disc) {
      std::optional<kj::Graph> g;
      if (!graph_path.empty()) {
        std::ifstream in(graph_path);
        if (!in) throw kj::InputError("cannot open graph file " + graph_path);
        std::stringstream buf;
        buf << in.rdbuf();
        g = kj::graph_from_json(kj::parse_json_text(buf.str()), "");
      } else if (!problem_path.empty()) {
        const kj::Problem p = kj::load_problem(problem_path);
        if (const auto* pg = std::get_if<kj::Graph>(&p.source)) g = *pg;
      }
      if (!g) throw kj::InputError("discriminant needs --graph or a problem with a graph source");
      emit(out_dir, "polynomial.json", kj::polynomial_to_json(kj::discriminant_polynomial(*g)));
      return kj::exit_ok;
    }

    if (*oracle) {
      kj::Problem p = kj::load_problem(problem_path);
      kj::apply_overrides(p, overrides);
      const kj::OracleResult r = kj::run_oracle(p, resolution, exec);
      emit(out_dir, "oracle.json", kj::to_json(r));
      if (!r.within_bound) {
        std::cerr << "oracle gap " << r.gap << " exceeds the grid error bound " << r.error_bound
                  << "\n";
        return kj::exit_verify_failed;
      }
      return kj::exit_ok;
    }
  } catch (const kj::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kj::exit_input_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kj::exit_input_error;
  }
  return kj::exit_ok;
}
