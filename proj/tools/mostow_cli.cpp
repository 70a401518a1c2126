// mostow: validate, decompose, minimize and verify Cartan-split presentations.

#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mostow/error.hpp"
#include "mostow/io.hpp"
#include "mostow/report.hpp"

namespace {

std::string read_input(const std::string& path) {
  std::ostringstream buf;
  if (path == "-") {
    buf << std::cin.rdbuf();
    return buf.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  buf << in.rdbuf();
  return buf.str();
}

bool use_color() {
  const char* no_color = std::getenv("NO_COLOR");
  if (no_color && *no_color) return false;
  return isatty(STDOUT_FILENO) != 0;
}

int emit(const mostow::RunResult& r, bool pretty) {
  std::cout << (pretty ? mostow::render_pretty(r.report, use_color())
                       : mostow::render_json(r.report));
  std::cout.flush();
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compatible metrics and minimal orbits for Cartan splits of real matrix Lie algebras"};
  app.require_subcommand(1);

  mostow::RunOptions opts;
  bool pretty = false;
  bool json_out = false;
  app.add_option("--tol", opts.tol, "relative rank tolerance for kernels")->check(CLI::PositiveNumber);
  app.add_option("--seed", opts.seed, "seed for every randomized step");
  app.add_option("--max-iter", opts.max_iter, "descent iteration cap")->check(CLI::PositiveNumber);
  app.add_option("--geodesics", opts.geodesics, "normal geodesics sampled by verify")
      ->check(CLI::NonNegativeNumber);
  auto* pretty_flag = app.add_flag("--pretty", pretty, "human-readable report");
  app.add_flag("--json", json_out, "JSON report (default)")->excludes(pretty_flag);
  app.add_flag("--timings", opts.timings, "include stage wall times in the report");

  std::string input;
  auto add_run = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("input", input, "presentation document, or - for stdin")->required();
    sub->fallthrough();
    return sub;
  };
  auto* validate = add_run("validate", "check basis, closure, semisimplicity and the split");
  auto* decompose = add_run("decompose", "compatible metric, base point, ambient split, triple system");
  auto* minimize = add_run("minimize", "descend log-volume on the fixed set to a minimal orbit");
  auto* verify = add_run("verify", "run every stage and cross-check the two paths");

  std::string catalog_name;
  auto* cat = app.add_subcommand("catalog", "list built-in presentations or print one");
  cat->add_option("name", catalog_name, "entry to print as a presentation document");
  cat->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : mostow::kExitInputError;
  }

  if (cat->parsed()) {
    if (catalog_name.empty()) {
      for (const auto& c : mostow::catalog()) std::cout << c.name << "\t" << c.description << "\n";
      return 0;
    }
    const mostow::CatalogEntry* c = mostow::find_catalog_entry(catalog_name);
    if (!c) {
      std::cerr << "mostow: unknown catalog entry '" << catalog_name << "'\n";
      return mostow::kExitInputError;
    }
    std::cout << mostow::emit_presentation(c->document);
    return 0;
  }

  mostow::PresentationDocument doc;
  try {
    doc = mostow::parse_presentation(read_input(input));
  } catch (const std::exception& e) {
    std::cerr << "mostow: " << input << ": " << e.what() << "\n";
    return mostow::kExitInputError;
  }

  try {
    if (validate->parsed()) return emit(mostow::run_validate(doc, opts), pretty);
    if (decompose->parsed()) return emit(mostow::run_decompose(doc, opts), pretty);
    if (minimize->parsed()) return emit(mostow::run_minimize(doc, opts), pretty);
    if (verify->parsed()) return emit(mostow::run_verify(doc, opts), pretty);
  } catch (const std::exception& e) {
    std::cerr << "mostow: " << e.what() << "\n";
    return mostow::kExitNotCertified;
  }
  return mostow::kExitInputError;
}
