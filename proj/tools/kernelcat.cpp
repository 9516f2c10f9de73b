#include <CLI11.hpp>

#include <unistd.h>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "kernelcat/error.hpp"
#include "kernelcat/runner.hpp"

namespace {

using namespace kernelcat;
using namespace kernelcat::cli;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitInvalid = 2;

bool use_color() { return std::getenv("KERNELCAT_NO_COLOR") == nullptr && isatty(STDOUT_FILENO) != 0; }

std::string styled(const std::string& text, const char* code) {
  return use_color() ? std::string("\033[") + code + "m" + text + "\033[0m" : text;
}

void emit(const std::string& text, const std::string& output) {
  if (output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(output, std::ios::binary);
  if (!out) throw Error(ErrorCode::ValidationError, "--output: cannot open '" + output + "' for writing");
  out << text;
}

std::string render(const Report& report, const std::string& format) {
  if (format == "csv") return to_csv(report);
  return to_json(report).dump(2) + "\n";
}

bool is_example(const std::string& name) {
  for (const auto& n : example_names()) {
    if (n == name) return true;
  }
  return false;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kernelcat: exact and Gaussian Bayesian inference with Markov kernels"};
  app.require_subcommand(1);

  std::string output;
  std::string format;
  std::uint64_t seed = kDefaultSeed;
  std::string target;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--output", output, "Write the report to this file instead of stdout");
    sub->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--seed", seed, "Seed for randomized checks");
  };

  auto* run = app.add_subcommand("run", "Execute the queries in a model file");
  run->add_option("path", target, "Model file")->required();
  add_common(run);

  auto* example = app.add_subcommand("example", "Run a bundled example (urn, cards, monty, gp-demo, kalman-demo)");
  example->add_option("name", target, "Example name")->required();
  add_common(example);

  auto* verify = app.add_subcommand("verify", "Run invariant checks on a model file or bundled example");
  verify->add_option("model", target, "Model file or example name")->required();
  add_common(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (run->parsed()) {
      const auto report = run_model(load_model(target), seed);
      emit(render(report, format.empty() ? "json" : format), output);
      return kExitOk;
    }
    if (example->parsed()) {
      const auto report = run_example(target, seed);
      emit(render(report, format.empty() ? std::string(example_default_format(target)) : format), output);
      return kExitOk;
    }
    const bool bundled = !std::filesystem::exists(target) && is_example(target);
    const auto file = bundled ? parse_model(example_model(target)) : load_model(target);
    const auto checks = verify_model(file, seed);
    bool all = true;
    std::string text;
    if (format == "json") {
      OutJson out = OutJson::object();
      out["seed"] = seed;
      out["checks"] = OutJson::array();
      for (const auto& c : checks) {
        out["checks"].push_back(OutJson{{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
        all = all && c.passed;
      }
      out["passed"] = all;
      text = out.dump(2) + "\n";
    } else {
      for (const auto& c : checks) {
        all = all && c.passed;
        text += (c.passed ? styled("PASS", "32") : styled("FAIL", "31")) + " " + c.name + ": " + c.detail + "\n";
      }
    }
    emit(text, output);
    return all ? kExitOk : kExitVerifyFailed;
  } catch (const Error& e) {
    std::cerr << styled("error", "31") << " [" << to_string(e.code()) << "] " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << styled("error", "31") << " " << e.what() << "\n";
    return kExitInvalid;
  }
}
