// Command-line surface: classify operator specs, inspect brackets and
// stratifications, expand commutator tables, solve basis systems, and run
// the estimate simulator.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "sostrat/basisrewrite.hpp"
#include "sostrat/estimsim.hpp"
#include "sostrat/parse.hpp"
#include "sostrat/report.hpp"
#include "sostrat/stratification.hpp"

namespace {

constexpr int kExitParse = 4;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

sostrat::SpecDocument load_spec(const std::string& path) {
  sostrat::SpecDocument doc = sostrat::parse_spec(read_file(path));
  if (doc.name.empty()) doc.name = std::filesystem::path(path).stem().string();
  return doc;
}

sostrat::StandardForm standard_form_of(const sostrat::OperatorSpec& raw) {
  using namespace sostrat;
  OperatorSpec spec = translate_to_origin(raw);
  OperatorSpec reduced = spec;
  try {
    CharManifold cm = detect_sigma1(spec);
    reduced = apply_cov(spec, cm.g);
  } catch (const pipeline_error& e) {
    if (e.kind() != FailKind::NoCommonFactor) throw;
  }
  return compute_q(classify_case(factor_p(reduced), /*relaxed=*/true));
}

int cmd_classify(const std::string& file, const std::string& json_out, int trunc, int grid,
                 int max_level, int hormander_grid) {
  using namespace sostrat;
  SpecDocument doc = load_spec(file);
  PipelineOptions opt;
  opt.trunc = trunc;
  opt.grid = grid;
  opt.max_level = max_level;
  ClassificationReport rep = run_pipeline(doc, opt);
  std::cout << render_text(rep);
  if (hormander_grid > 0 && rep.q) {
    // Sampled variant of the bracket-generation check over a box.
    int half = std::max(1, hormander_grid / 2);
    int lo = INT32_MAX, hi = 0, fails = 0;
    for (int i = -half; i <= half; ++i)
      for (int j = -half; j <= half; ++j)
        for (int k = -half; k <= half; ++k) {
          std::array<Rational, 3> pt{Rational(i, 4 * half), Rational(j, 4 * half),
                                     Rational(k, 4 * half)};
          auto h = hormander_check(doc.spec, pt, *rep.q + 1);
          if (!h.ok()) {
            ++fails;
          } else {
            lo = std::min(lo, *h.length);
            hi = std::max(hi, *h.length);
          }
        }
    std::cout << "bracket generation on the sample box: lengths " << lo << ".." << hi << ", "
              << fails << " failures\n";
  }
  if (!json_out.empty()) {
    std::ofstream out(json_out);
    out << to_json(rep).dump(2) << "\n";
  }
  return rep.exit_code();
}

int cmd_corpus(const std::string& dir, int jobs) {
  namespace fs = std::filesystem;
  std::vector<std::string> files;
  for (auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".op") files.push_back(e.path().string());
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    std::cerr << "no .op files under " << dir << "\n";
    return 2;
  }
  struct Row {
    std::string file;
    std::vector<std::string> mismatches;
    std::string error;
  };
  auto run_one = [](const std::string& path) {
    Row row;
    row.file = path;
    try {
      sostrat::SpecDocument doc = load_spec(path);
      sostrat::ClassificationReport rep = sostrat::run_pipeline(doc);
      if (doc.expect.any()) row.mismatches = sostrat::compare_expectation(rep, doc.expect);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    return row;
  };
  std::vector<Row> rows(files.size());
  if (jobs <= 1) {
    for (size_t i = 0; i < files.size(); ++i) rows[i] = run_one(files[i]);
  } else {
    std::vector<std::future<Row>> futs;
    for (auto& f : files) futs.push_back(std::async(std::launch::async, run_one, f));
    for (size_t i = 0; i < futs.size(); ++i) rows[i] = futs[i].get();
  }
  int failures = 0;
  for (auto& row : rows) {
    if (!row.error.empty()) {
      ++failures;
      std::cout << "[fail] " << row.file << ": " << row.error << "\n";
    } else if (!row.mismatches.empty()) {
      ++failures;
      std::cout << "[fail] " << row.file << "\n";
      for (auto& m : row.mismatches) std::cout << "       " << m << "\n";
    } else {
      std::cout << "[ ok ] " << row.file << "\n";
    }
  }
  std::cout << (failures == 0 ? "all specs match" : std::to_string(failures) + " spec(s) failed")
            << "\n";
  return failures == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact classifier for degenerate sums of squares of three vector fields"};
  app.require_subcommand(1);

  std::string file, json_out, target_expr, trace_out, dir, mode = "dp", word_csv;
  int trunc = 0, grid = 11, max_level = 0, hormander_grid = 0;
  int j_idx = 2, m_ord = 2, p = 2, q = 3, r = 10, jobs = 1;

  auto* classify = app.add_subcommand("classify", "classify an operator spec file");
  classify->add_option("file", file)->required();
  classify->add_option("--json", json_out, "write the JSON report here");
  classify->add_option("--trunc", trunc, "series truncation order (default 2(q+1))");
  classify->add_option("--grid", grid, "sample-grid points per axis (default 11)");
  classify->add_option("--max-level", max_level, "stratification depth (default q)");
  classify->add_option("--hormander-grid", hormander_grid,
                       "also sample the bracket-generation depth on an N^3 box");

  auto* stratify = app.add_subcommand("stratify", "print the bracket stratification layers");
  stratify->add_option("file", file)->required();
  stratify->add_option("--max-level", max_level)->required();

  auto* bracket_cmd = app.add_subcommand("bracket", "evaluate an iterated bracket X_I");
  bracket_cmd->add_option("file", file)->required();
  bracket_cmd->add_option("--word", word_csv, "comma-separated indices, e.g. 1,1,3")->required();

  auto* expand = app.add_subcommand("expand", "commutator expansion coefficients of [X_j, D3^m]");
  expand->add_option("file", file)->required();
  expand->add_option("-j", j_idx, "field index 1..3")->required();
  expand->add_option("-m", m_ord, "commutator order (<= 4)")->required();
  expand->add_option("--trunc", trunc, "series truncation order (default 8)");

  auto* basis = app.add_subcommand("basis", "express a target field in the X-basis");
  basis->add_option("file", file)->required();
  basis->add_option("--target", target_expr, "field expression, e.g. \"x1^4*D3\"")->required();
  basis->add_option("--trunc", trunc, "series truncation order (default 8)");

  auto* sim = app.add_subcommand("estimate-sim", "search the estimate rewrite system");
  sim->add_option("-p", p)->required();
  sim->add_option("-q", q)->required();
  sim->add_option("-r", r)->required();
  sim->add_option("--mode", mode, "dp | exhaustive | greedy")->check(CLI::IsMember({"dp", "exhaustive", "greedy"}));
  sim->add_option("--trace", trace_out, "write the maximizing derivation here");

  auto* corpus = app.add_subcommand("corpus", "classify every .op file and check expectations");
  corpus->add_option("dir", dir)->required();
  corpus->add_option("--jobs", jobs, "parallel classifications (default 1)");

  CLI11_PARSE(app, argc, argv);

  try {
    using namespace sostrat;
    if (classify->parsed())
      return cmd_classify(file, json_out, trunc, grid, max_level, hormander_grid);

    if (stratify->parsed()) {
      SpecDocument doc = load_spec(file);
      for (auto& l : stratification(translate_to_origin(doc.spec), max_level)) {
        std::cout << "Sigma_" << l.level << ": " << layer_status_name(l.status);
        if (!l.equation.empty()) std::cout << "  (" << l.equation << ")";
        std::cout << "\n";
      }
      return 0;
    }

    if (bracket_cmd->parsed()) {
      SpecDocument doc = load_spec(file);
      std::vector<int> idx;
      std::stringstream ss(word_csv);
      std::string part;
      while (std::getline(ss, part, ',')) idx.push_back(std::stoi(part));
      FieldSymbol f = iterated_bracket(doc.spec, BracketWord(idx));
      std::cout << "X_(" << word_csv << ") = " << detail::field_to_expr(f) << "\n";
      return 0;
    }

    if (expand->parsed()) {
      SpecDocument doc = load_spec(file);
      StandardForm sf = standard_form_of(doc.spec);
      GammaTable t = expand_commutator(sf, j_idx, m_ord, trunc > 0 ? trunc : 8);
      for (int l = 0; l <= t.m; ++l)
        for (int h = 0; h < 3; ++h)
          if (!t.level(l)[size_t(h)].is_zero())
            std::cout << "gamma[j=" << t.j << "][h=" << h + 1 << "]^(" << l
                      << ") = " << to_string(t.level(l)[size_t(h)]) << "\n";
      return 0;
    }

    if (basis->parsed()) {
      SpecDocument doc = load_spec(file);
      StandardForm sf = standard_form_of(doc.spec);
      FieldSymbol target = parse_field_expr(target_expr);
      BasisCoeffs bc = solve_basis(target, sf, trunc > 0 ? trunc : 8);
      std::cout << "a = " << to_string(bc.a) << "\nb = " << to_string(bc.b)
                << "\nc = " << to_string(bc.c) << "\n(truncation " << bc.trunc << ")\n";
      return 0;
    }

    if (sim->parsed()) {
      SearchMode m = mode == "dp"           ? SearchMode::dp
                     : mode == "exhaustive" ? SearchMode::exhaustive
                                            : SearchMode::greedy;
      SearchResult res = max_weight(p, q, r, m);
      Rational ratio(res.weight, r);
      std::cout << "max weight K+L = " << res.weight << "  (ratio " << to_string(ratio)
                << ", bound q/p = " << to_string(Rational(q, p)) << ")\n";
      if (!res.completed) std::cout << "warning: greedy run did not reach a terminal state\n";
      if (!trace_out.empty()) {
        std::ofstream out(trace_out);
        out << trace_to_text(res.trace);
      }
      return 0;
    }

    if (corpus->parsed()) return cmd_corpus(dir, jobs);
  } catch (const sostrat::parse_error& e) {
    std::cerr << e.what() << "\n";
    return kExitParse;
  } catch (const sostrat::pipeline_error& e) {
    std::cerr << e.what() << "\n";
    return e.kind() == sostrat::FailKind::NeedsCoordinateChange ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return 0;
}
