// subkit: command-line front end.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "subkit/bundled.hpp"
#include "subkit/criteria.hpp"
#include "subkit/discrepancy.hpp"
#include "subkit/dsl.hpp"
#include "subkit/engine.hpp"
#include "subkit/language.hpp"
#include "subkit/operator.hpp"
#include "subkit/report.hpp"

using namespace subkit;

namespace {

struct Global {
  std::string spec = "";
  std::int64_t cutoff = 64;
  std::int64_t cutoff2 = 128;
  double tol = 1e-10;
  std::uint64_t seed = 1;
  std::string format;
  std::string out;
};

struct SpecError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

SubstitutionSpec load_spec(const std::string& where) {
  if (where.empty()) throw SpecError("--spec is required");
  std::string text;
  if (where.rfind("builtin:", 0) == 0) {
    const auto* b = find_bundled(where.substr(8));
    if (!b) throw SpecError("no bundled spec named '" + where.substr(8) + "'");
    text = b->source;
  } else {
    std::ifstream in(where);
    if (!in) throw SpecError("cannot read " + where);
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  return parse(text);
}

void emit(const Global& g, const std::string& text) {
  if (g.out.empty() || g.out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(g.out);
  if (!f) throw std::runtime_error("cannot write " + g.out);
  f << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json base_config(const Global& g) {
  return {{"spec", g.spec}, {"cutoff", g.cutoff}, {"cutoff2", g.cutoff2}, {"tol", g.tol}};
}

std::vector<Letter> parse_letter_list(const AlphabetDecl& alphabet, const std::string& text) {
  std::vector<Letter> out;
  // split on commas that are not inside parentheses
  std::string cur;
  int depth = 0;
  auto flush = [&] {
    auto b = cur.find_first_not_of(" \t");
    auto e = cur.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(parse_letter(alphabet, cur.substr(b, e - b + 1)));
    cur.clear();
  };
  for (char c : text) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      flush();
      continue;
    }
    cur += c;
  }
  flush();
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"subkit: substitutions on compact alphabets"};
  app.require_subcommand(1);
  app.fallthrough();
  Global g;
  app.add_option("--spec", g.spec, "spec file, or builtin:<name>");
  app.add_option("--cutoff", g.cutoff, "truncation cutoff")->check(CLI::Range(std::int64_t{4}, std::int64_t{1} << 20));
  app.add_option("--cutoff2", g.cutoff2, "second cutoff for stability (0 disables)");
  app.add_option("--tol", g.tol, "power iteration tolerance");
  app.add_option("--seed", g.seed, "seed for sampled checks");
  app.add_option("--format", g.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--out", g.out, "output file (default stdout)");

  // expand
  auto* expand_cmd = app.add_subcommand("expand", "print rho^k(a)");
  std::string letter_text;
  unsigned level = 1;
  bool stats = false;
  std::uint64_t budget = kDefaultExpansionBudget;
  expand_cmd->add_option("--letter", letter_text, "starting letter")->required();
  expand_cmd->add_option("--level", level, "number of substitution steps");
  expand_cmd->add_flag("--stats", stats, "print lengths instead of the word");
  expand_cmd->add_option("--budget", budget, "largest word to materialise");

  // language
  auto* language_cmd = app.add_subcommand("language", "legal words of length n");
  std::size_t word_length = 2;
  bool primitive_form = false;
  language_cmd->add_option("--n", word_length, "word length")->check(CLI::PositiveNumber);
  language_cmd->add_flag("--primitive", primitive_form, "use the primitive form S_n(rho^P(L2))");

  // spectrum
  auto* spectrum_cmd = app.add_subcommand("spectrum", "r, l, mu, r2 of the truncated operator");
  unsigned bounds_n = 8;
  spectrum_cmd->add_option("--bounds", bounds_n, "levels for the supertile length bounds");

  // converge
  auto* converge_cmd = app.add_subcommand("converge", "power convergence diagnostics");
  std::size_t converge_n = 50;
  converge_cmd->add_option("--nmax", converge_n, "number of powers");

  // check
  auto* check_cmd = app.add_subcommand("check", "criteria");
  check_cmd->require_subcommand(1);
  PrimitivityOptions prim;
  auto* prim_cmd = check_cmd->add_subcommand("primitivity", "epsilon-primitivity certificate");
  prim_cmd->add_option("--eps", prim.eps);
  prim_cmd->add_option("--pmax", prim.p_max);
  prim_cmd->add_option("--sample", prim.sample_size);
  unsigned irr_power = 1;
  auto* irr_cmd = check_cmd->add_subcommand("irreducible", "strong connectivity of the letter digraph");
  irr_cmd->add_option("--power", irr_power, "test rho^k");
  std::string p_text;
  unsigned k_max = 4;
  auto* qc_cmd = check_cmd->add_subcommand("quasicompact", "C_k(P) against rLower^k");
  qc_cmd->add_option("--P", p_text, "comma separated letters")->required();
  qc_cmd->add_option("--kmax", k_max);
  EquicontinuityOptions equi;
  auto* equi_cmd = check_cmd->add_subcommand("equicontinuity", "column semigroup of a constant-length rule");
  equi_cmd->add_option("--depth", equi.depth);
  auto* length_cmd = check_cmd->add_subcommand("length", "length function diagnostics");

  // discrepancy
  auto* disc_cmd = app.add_subcommand("discrepancy", "Exp versus Act decay fit");
  DiscrepancyOptions disc;
  std::string panel_kind = "indicators";
  std::string summary_path;
  disc_cmd->add_option("--nmax", disc.n_max);
  disc_cmd->add_option("--eps-tol", disc.eps_tol);
  disc_cmd->add_option("--panel", panel_kind)->check(CLI::IsMember({"indicators", "length"}));
  disc_cmd->add_option("--summary", summary_path, "where to write the JSON summary in csv mode");

  // examples
  auto* examples_cmd = app.add_subcommand("examples", "bundled spec inventory");
  std::string export_dir;
  examples_cmd->add_option("--export", export_dir, "write every bundled spec to DIR/<name>.sub");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (examples_cmd->parsed()) {
      if (!export_dir.empty()) {
        std::filesystem::create_directories(export_dir);
        for (const auto& b : bundled_specs()) {
          std::ofstream f(std::filesystem::path(export_dir) / (b.name + ".sub"));
          f << bundled_file_text(b);
        }
      }
      Json list = Json::array();
      for (const auto& b : bundled_specs())
        list.push_back({{"name", b.name}, {"title", b.title}, {"provenance", b.provenance}});
      Json j{{"schema", kSchemaVersion}, {"command", "examples"}, {"count", bundled_specs().size()}, {"examples", list}};
      emit(g, dump(j));
      return 0;
    }

    const auto spec = load_spec(g.spec);
    Json config = base_config(g);
    PowerIterationOptions power;
    power.tol = g.tol;

    if (expand_cmd->parsed()) {
      const Letter a = parse_letter(spec.alphabet, letter_text);
      config["letter"] = letter_text;
      config["level"] = level;
      if (stats || g.format == "json") {
        LengthCounter counter(spec);
        Json lengths = Json::array();
        for (unsigned k = 0; k <= level; ++k) lengths.push_back(counter.count(a, k));
        Json result{{"letter", letter_text}, {"level", level}, {"lengths", lengths}};
        if (level >= 1) {
          auto s = supertile_length_stats(spec, level);
          result["min"] = s.min;
          result["max"] = s.max;
          result["stats"] = to_json(spec, s);
        }
        if (!stats) result["word"] = format_word(spec.alphabet, expand(spec, a, level, budget));
        emit(g, dump(envelope("expand", spec, config, g.seed, result)));
      } else {
        emit(g, format_word(spec.alphabet, expand(spec, a, level, budget)) + "\n");
      }
      return 0;
    }

    if (language_cmd->parsed()) {
      auto scheme = TruncationScheme::build(spec.alphabet, g.cutoff);
      LanguageOptions lo;
      lo.primitive = primitive_form;
      config["n"] = word_length;
      auto table = legal_words(spec, scheme, word_length, lo);
      emit(g, dump(envelope("language", spec, config, g.seed, to_json(scheme, table))));
      return 0;
    }

    if (spectrum_cmd->parsed()) {
      SpectrumOptions so;
      so.cutoff = g.cutoff;
      so.cutoff2 = g.cutoff2;
      so.power = power;
      so.bounds_n_max = bounds_n;
      auto a = analyze_spectrum(spec, so);
      emit(g, dump(envelope("spectrum", spec, config, g.seed, to_json(a))));
      return 0;
    }

    if (converge_cmd->parsed()) {
      auto op = TruncatedOperator::build(spec, TruncationScheme::build(spec.alphabet, g.cutoff));
      auto rep = power_iteration(op, power);
      auto d = convergence_diagnostics(op, rep, default_panel(op, rep), converge_n);
      if (g.format == "json") {
        config["nmax"] = converge_n;
        Json result{{"verdict", d.verdict},
                    {"uniform", d.uniform},
                    {"strong", d.strong},
                    {"meanErgodic", d.mean_ergodic},
                    {"uniformExact", d.uniform_exact},
                    {"rowsUsed", d.rows_used},
                    {"panel", d.names},
                    {"csv", convergence_csv(d)}};
        if (spec.alphabet.family == AlphabetFamily::Circle) {
          Json spikes = Json::array();
          for (const auto& w : circle_spike_witness(op, rep, std::min<std::size_t>(converge_n, 20)))
            spikes.push_back({{"n", w.n}, {"valueAtZero", w.value_at_zero}, {"mean", w.mean}, {"lowerBound", w.lower_bound}});
          result["spikeWitness"] = spikes;
        }
        emit(g, dump(envelope("converge", spec, config, g.seed, result)));
      } else {
        emit(g, convergence_csv(d));
      }
      return 0;
    }

    if (check_cmd->parsed()) {
      auto scheme = TruncationScheme::build(spec.alphabet, g.cutoff);
      Json result;
      std::string name;
      if (prim_cmd->parsed()) {
        name = "check primitivity";
        prim.seed = g.seed;
        config["eps"] = prim.eps;
        config["pmax"] = prim.p_max;
        config["sample"] = prim.sample_size;
        result = to_json(spec.alphabet, check_primitivity(spec, prim));
      } else if (irr_cmd->parsed()) {
        name = "check irreducible";
        config["power"] = irr_power;
        result = to_json(spec.alphabet, check_irreducibility(spec, scheme, irr_power));
      } else if (qc_cmd->parsed()) {
        name = "check quasicompact";
        config["P"] = p_text;
        config["kmax"] = k_max;
        result = to_json(spec.alphabet, quasi_compact_check(spec, parse_letter_list(spec.alphabet, p_text), k_max));
      } else if (equi_cmd->parsed()) {
        name = "check equicontinuity";
        config["depth"] = equi.depth;
        result = to_json(equicontinuity_check(spec, equi));
      } else if (length_cmd->parsed()) {
        name = "check length";
        result = to_json(length_function_diagnostics(spec, g.cutoff, g.cutoff2 > 0 ? g.cutoff2 : 2 * g.cutoff));
      }
      emit(g, dump(envelope(name, spec, config, g.seed, result)));
      return 0;
    }

    if (disc_cmd->parsed()) {
      SpectrumOptions so;
      so.cutoff = g.cutoff;
      so.cutoff2 = g.cutoff2;
      so.power = power;
      auto a = analyze_spectrum(spec, so);
      std::vector<TestFunction> panel = panel_kind == "length"
                                            ? std::vector<TestFunction>{{"length", a.report.length, false}}
                                            : indicator_panel(a.op);
      disc.keep_table = false;
      auto rep = decay_fit(spec, a, panel, disc);
      config["nmax"] = disc.n_max;
      config["epsTol"] = disc.eps_tol;
      config["panel"] = panel_kind;
      Json summary = envelope("discrepancy", spec, config, g.seed, to_json(rep));
      if (g.format == "csv") {
        emit(g, discrepancy_csv(rep));
        std::string path = !summary_path.empty() ? summary_path : (!g.out.empty() && g.out != "-" ? g.out + ".json" : "");
        if (!path.empty()) {
          std::ofstream f(path);
          f << dump(summary);
        } else {
          std::cerr << dump(summary);
        }
      } else {
        summary["result"]["csv"] = discrepancy_csv(rep);
        emit(g, dump(summary));
      }
      return 0;
    }
  } catch (const ParseFailure& e) {
    for (const auto& err : e.errors())
      std::cerr << "parse error (" << to_string(err.kind) << ") line " << err.line << ":" << err.column << ": "
                << err.message << "\n";
    return 1;
  } catch (const SpecError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const AlphabetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "computation error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
