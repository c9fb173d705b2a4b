#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "criteria.hpp"
#include "output.hpp"
#include "plot.hpp"
#include "scdim/coarsemaps.hpp"
#include "scdim/covers.hpp"
#include "scdim/dimsolver.hpp"
#include "scdim/errors.hpp"
#include "scdim/funcalg.hpp"
#include "scdim/metricspace.hpp"
#include "scdim/semigroup.hpp"

#ifndef SCDIM_VERSION
#define SCDIM_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using namespace scdim;
using namespace scdim::cli;

namespace {

enum Exit { ok = 0, verification_failed = 1, invalid_input = 2, cap_exceeded = 3 };

// Options shared by every leaf command; only one leaf runs per invocation.
struct Common {
  std::optional<std::string> output;
  std::uint64_t seed = 0;
  bool no_timestamp = false;
  std::size_t exact_cap = SolveOptions::from_environment().exact_cap;
  std::string config;

  RunHeader header() const { return {SCDIM_VERSION, config, seed, !no_timestamp}; }
  Sink sink() const { return Sink(output ? std::optional<fs::path>(*output) : std::nullopt); }
  SolveOptions solve() const {
    if (exact_cap == 0) throw InvalidInput("--exact-cap must be positive");
    SolveOptions o = SolveOptions::from_environment();
    o.exact_cap = exact_cap;
    o.seed = seed;
    return o;
  }
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-o,--output", c.output, "Write to this file (atomically) instead of stdout");
  cmd->add_option("--seed", c.seed, "Seed for random generators and heuristic restarts")->capture_default_str();
  cmd->add_flag("--no-timestamp", c.no_timestamp, "Omit the timestamp line from the output header");
  cmd->add_option("--exact-cap", c.exact_cap,
                  "Largest space handed to the exact solver (default from SCDIM_EXACT_CAP, else 24)")
      ->capture_default_str();
}

std::string join_args(int argc, char** argv) {
  std::string out;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a.find_first_of(" \t\"") != std::string::npos) a = "\"" + a + "\"";
    out += (i > 1 ? " " : "") + a;
  }
  return out;
}

FiniteMetricSpace load_space(const fs::path& path) { return parse_space(read_file(path)); }

std::vector<Rational> parse_list(const std::string& text) {
  std::vector<Rational> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(parse_rational(item));
  }
  if (out.empty()) throw InvalidInput("empty list '" + text + "'");
  return out;
}

std::vector<Rational> parse_scales(const std::string& text, const FiniteMetricSpace& x) {
  if (text == "auto") return auto_scales(x);
  auto scales = parse_list(text);
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (sgn(scales[i]) <= 0) throw InvalidInput("scales must be positive");
    if (i > 0 && scales[i] <= scales[i - 1]) throw InvalidInput("scales must be strictly increasing");
  }
  return scales;
}

struct LoadedMap {
  PointMap map;
  std::string source_path, target_path;
};

LoadedMap load_map(const fs::path& path) {
  auto file = parse_map_file(read_file(path));
  auto src = load_space(resolve_relative(file.source_path, path));
  auto tgt = load_space(resolve_relative(file.target_path, path));
  return {PointMap::from_labels(std::move(src), std::move(tgt), file.pairs), file.source_path, file.target_path};
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

// ---------------------------------------------------------------------------
// gen

int emit_space(const Common& c, const FiniteMetricSpace& x, const std::string& extra = {}) {
  c.sink().write(c.header().lines() + extra + format_space(x));
  return ok;
}

void register_gen(CLI::App& app, Common& c, std::function<int()>& run) {
  auto* gen = app.add_subcommand("gen", "Generate a metric space file");
  gen->require_subcommand(1);

  {
    auto* cmd = gen->add_subcommand("counterexample", "Blocks C_1..C_k built from a control function");
    auto fn = std::make_shared<std::string>("piece(1,inf; 1,2,0)");
    auto depth = std::make_shared<std::size_t>(3);
    cmd->add_option("--fn", *fn, "Control function expression")->capture_default_str();
    cmd->add_option("--depth", *depth, "Number of blocks")->capture_default_str();
    add_common(cmd, c);
    cmd->callback([&, fn, depth] {
      run = [&, fn, depth] {
        const auto [x, b] = counterexample_space(ControlFunction::parse(*fn), *depth);
        std::string extra = "# n_j:";
        for (const auto& v : b.n) extra += " " + to_string(v);
        extra += "\n# a_j:";
        for (const auto& v : b.a) extra += " " + to_string(v);
        return emit_space(c, x, extra + "\n");
      };
    });
  }
  {
    auto* cmd = gen->add_subcommand("grid", "{0..side}^dims with the sup-metric");
    auto dims = std::make_shared<std::size_t>(1), side = std::make_shared<std::size_t>(3);
    cmd->add_option("--dims", *dims, "Dimension (1-3)")->capture_default_str();
    cmd->add_option("--side", *side, "Side length")->capture_default_str();
    add_common(cmd, c);
    cmd->callback([&, dims, side] { run = [&, dims, side] { return emit_space(c, grid_box(*dims, *side)); }; });
  }
  {
    auto* cmd = gen->add_subcommand("lomega", "Finite slice of L_omega from symbol sequences");
    auto start = std::make_shared<std::int64_t>(0);
    auto points = std::make_shared<std::vector<std::string>>();
    cmd->add_option("--window-start", *start, "Index of the first symbol")->capture_default_str();
    cmd->add_option("--point", *points, "label=s0,s1,... (repeatable)")->required();
    add_common(cmd, c);
    cmd->callback([&, start, points] {
      run = [&, start, points] {
        std::vector<LOmegaPoint> pts;
        for (const auto& text : *points) {
          auto eq = text.find('=');
          if (eq == std::string::npos) throw InvalidInput("expected label=s0,s1,... in '" + text + "'");
          LOmegaPoint p{text.substr(0, eq), {}};
          std::stringstream in(text.substr(eq + 1));
          std::string sym;
          while (std::getline(in, sym, ',')) p.symbols.push_back(sym);
          pts.push_back(std::move(p));
        }
        return emit_space(c, lomega_slice(*start, pts));
      };
    });
  }
  {
    auto* cmd = gen->add_subcommand("ultrametric", "Random hierarchical ultrametric");
    auto size = std::make_shared<std::size_t>(16), levels = std::make_shared<std::size_t>(4);
    auto jitter = std::make_shared<bool>(false);
    cmd->add_option("--size", *size, "Number of points")->capture_default_str();
    cmd->add_option("--levels", *levels, "Number of split levels")->capture_default_str();
    cmd->add_flag("--jitter", *jitter, "Scale split values by random factors in [1, 3)");
    add_common(cmd, c);
    cmd->callback([&, size, levels, jitter] {
      run = [&, size, levels, jitter] {
        return emit_space(c, random_ultrametric(c.seed, *size, *levels, {*jitter}));
      };
    });
  }
  {
    auto* cmd = gen->add_subcommand("random", "Shortest-path metric of a random weighted complete graph");
    auto size = std::make_shared<std::size_t>(10);
    auto weight = std::make_shared<std::uint64_t>(10);
    cmd->add_option("--size", *size, "Number of points")->capture_default_str();
    cmd->add_option("--max-weight", *weight, "Largest edge weight")->capture_default_str();
    add_common(cmd, c);
    cmd->callback([&, size, weight] {
      run = [&, size, weight] { return emit_space(c, random_metric(c.seed, *size, *weight)); };
    });
  }
  {
    auto* cmd = gen->add_subcommand("product", "Product of two spaces with the sup-metric");
    auto a = std::make_shared<std::string>(), b = std::make_shared<std::string>();
    cmd->add_option("first", *a, "First space file")->required();
    cmd->add_option("second", *b, "Second space file")->required();
    add_common(cmd, c);
    cmd->callback([&, a, b] { run = [&, a, b] { return emit_space(c, product(load_space(*a), load_space(*b))); }; });
  }
  {
    auto* cmd = gen->add_subcommand("perturb", "min(c, d) or max(c, d) applied to a space");
    auto file = std::make_shared<std::string>(), mode = std::make_shared<std::string>("min");
    auto cval = std::make_shared<std::string>("1");
    cmd->add_option("space", *file, "Space file")->required();
    cmd->add_option("--mode", *mode, "min or max")->check(CLI::IsMember({"min", "max"}))->capture_default_str();
    cmd->add_option("--c", *cval, "Positive rational c")->capture_default_str();
    add_common(cmd, c);
    cmd->callback([&, file, mode, cval] {
      run = [&, file, mode, cval] {
        auto x = load_space(*file);
        auto cv = parse_rational(*cval);
        return emit_space(c, *mode == "min" ? perturb_min(x, cv) : perturb_max(x, cv));
      };
    });
  }
}

// ---------------------------------------------------------------------------
// profile, plot, classify

nlohmann::ordered_json header_json(const RunHeader& h) {
  nlohmann::ordered_json j;
  j["tool"] = "scdim " + h.version;
  j["config"] = h.config;
  j["seed"] = h.seed;
  if (h.timestamp) {
    std::string line = h.lines("");
    auto pos = line.find("timestamp: ");
    if (pos != std::string::npos) j["timestamp"] = line.substr(pos + 11, line.find('\n', pos) - pos - 11);
  }
  return j;
}

void register_profile(CLI::App& app, Common& c, std::function<int()>& run) {
  auto* cmd = app.add_subcommand("profile", "Sample D_n(s) of a space over a scale grid");
  auto file = std::make_shared<std::string>();
  auto colors = std::make_shared<std::size_t>(1);
  auto scales = std::make_shared<std::string>("auto");
  auto format = std::make_shared<std::string>("csv");
  auto log_log = std::make_shared<bool>(false);
  cmd->add_option("space", *file, "Space file")->required();
  cmd->add_option("--colors", *colors, "Number of colors n+1")->capture_default_str();
  cmd->add_option("--scales", *scales, "'auto' (distinct distances) or a strictly increasing list a,b,c")
      ->capture_default_str();
  cmd->add_option("--format", *format, "csv, json or svg (svg also writes the CSV next to it)")
      ->check(CLI::IsMember({"csv", "json", "svg"}))
      ->capture_default_str();
  cmd->add_flag("--log-log", *log_log, "Logarithmic axes for svg output");
  add_common(cmd, c);
  cmd->callback([&, file, colors, scales, format, log_log] {
    run = [&, file, colors, scales, format, log_log]() -> int {
      if (*colors == 0) throw InvalidInput("--colors must be at least 1");
      const auto x = load_space(*file);
      auto p = profile(x, *colors - 1, parse_scales(*scales, x), c.solve());
      p.grid = *scales == "auto" ? "auto" : "list";
      const auto h = c.header();
      const std::string csv = h.lines() + format_profile_csv(p);
      if (*format == "csv") {
        c.sink().write(csv);
      } else if (*format == "json") {
        nlohmann::ordered_json j;
        j["header"] = header_json(h);
        j["space"] = p.provenance;
        j["colors"] = p.color_count;
        j["grid"] = p.grid;
        j["samples"] = nlohmann::ordered_json::array();
        for (const auto& s : p.samples) {
          j["samples"].push_back({{"s", to_string(s.s)},
                                  {"n", p.color_count - 1},
                                  {"bound", to_string(s.bound)},
                                  {"method", to_string(s.method)},
                                  {"status", s.status}});
        }
        c.sink().write(j.dump(2) + "\n");
      } else {
        if (!c.output) throw InvalidInput("svg output needs -o so that the CSV can be written next to it");
        fs::path svg(*c.output), csv_path(*c.output);
        csv_path.replace_extension(".csv");
        write_atomic(csv_path, csv);
        write_atomic(svg, render_profile_svg(csv, *log_log));
      }
      return ok;
    };
  });

  auto* plot = app.add_subcommand("plot", "Render a profile CSV as SVG");
  auto csv_file = std::make_shared<std::string>();
  auto plot_log = std::make_shared<bool>(false);
  plot->add_option("csv", *csv_file, "Profile CSV")->required();
  plot->add_flag("--log-log", *plot_log, "Logarithmic axes");
  add_common(plot, c);
  plot->callback([&, csv_file, plot_log] {
    run = [&, csv_file, plot_log] {
      c.sink().write(render_profile_svg(read_file(*csv_file), *plot_log));
      return ok;
    };
  });
}

void register_classify(CLI::App& app, Common& c, std::function<int()>& run) {
  auto* cmd = app.add_subcommand("classify", "Growth class of a profile's tail");
  auto file = std::make_shared<std::string>();
  auto cls = std::make_shared<std::string>("linear");
  auto cap = std::make_shared<std::string>("64");
  auto tail = std::make_shared<std::size_t>(0);
  auto tolerance = std::make_shared<double>(0.05);
  cmd->add_option("profile", *file, "Profile CSV")->required();
  cmd->add_option("--class", *cls, "linear, power or fn:<expression>")->capture_default_str();
  cmd->add_option("--linear-cap", *cap, "Largest C of the grid 1, 2, 4, ...")->capture_default_str();
  cmd->add_option("--tail", *tail, "Tail size (default: half the samples, at least 3)");
  cmd->add_option("--power-tolerance", *tolerance, "Allowed spread of log-log slopes")->capture_default_str();
  add_common(cmd, c);
  cmd->callback([&, file, cls, cap, tail, tolerance] {
    run = [&, file, cls, cap, tail, tolerance] {
      const auto p = parse_profile_csv(read_file(*file));
      ClassifyOptions opt;
      opt.linear_cap = parse_rational(*cap);
      opt.power_tolerance = *tolerance;
      if (*tail > 0) opt.tail_size = *tail;
      GrowthVerdict v;
      if (*cls == "linear") {
        v = classify_linear(p, opt);
      } else if (*cls == "power") {
        v = classify_power(p, opt);
      } else if (cls->rfind("fn:", 0) == 0) {
        v = classify_against(p, ControlFunction::parse(cls->substr(3)), opt);
      } else {
        throw InvalidInput("--class must be linear, power or fn:<expression>");
      }
      c.sink().write(c.header().lines() + "verdict: " + v.to_string() + "\n");
      using K = GrowthVerdict::Kind;
      return v.kind == K::linear || v.kind == K::power || v.kind == K::dominated ? ok : verification_failed;
    };
  });
}

// ---------------------------------------------------------------------------
// cover, semigroup, fn

void register_cover(CLI::App& app, Common& c, std::function<int()>& run) {
  auto* cover = app.add_subcommand("cover", "Colored cover utilities");
  cover->require_subcommand(1);
  auto* cmd = cover->add_subcommand("report", "Bound, s-disjointness, Lebesgue number and multiplicity");
  auto file = std::make_shared<std::string>();
  auto s = std::make_shared<std::string>();
  auto format = std::make_shared<std::string>("text");
  cmd->add_option("cover", *file, "Cover file")->required();
  cmd->add_option("--s", *s, "Scale s")->required();
  cmd->add_option("--format", *format, "text or csv")->check(CLI::IsMember({"text", "csv"}))->capture_default_str();
  add_common(cmd, c);
  cmd->callback([&, file, s, format] {
    run = [&, file, s, format] {
      const fs::path path(*file);
      auto cf = parse_cover_file(read_file(path));
      auto x = load_space(resolve_relative(cf.space_path, path));
      ColoredCover cov(std::move(x), cf.color_count, std::move(cf.pieces));
      auto r = report(cov, parse_rational(*s));
      c.sink().write(c.header().lines() + (*format == "text" ? report_text(r) : report_csv(r)));
      return ok;
    };
  });
}

void register_semigroup(CLI::App& app, Common& c, std::function<int()>& run) {
  auto* sg = app.add_subcommand("semigroup", "Control semigroup queries");
  sg->require_subcommand(1);
  auto* cmd = sg->add_subcommand("finer", "Is every generator of COARSE dominated in FINE?");
  auto fine = std::make_shared<std::string>(), coarse = std::make_shared<std::string>();
  auto depth = std::make_shared<std::size_t>(3);
  auto slopes = std::make_shared<std::string>("1,2,4,8,16");
  cmd->add_option("fine", *fine, "Semigroup file")->required();
  cmd->add_option("coarse", *coarse, "Semigroup file")->required();
  cmd->add_option("--depth", *depth, "Longest composition chain")->capture_default_str();
  cmd->add_option("--slopes", *slopes, "Linear slopes available to chains")->capture_default_str();
  add_common(cmd, c);
  cmd->callback([&, fine, coarse, depth, slopes] {
    run = [&, fine, coarse, depth, slopes] {
      const auto f = parse_semigroup(read_file(*fine));
      const auto g = parse_semigroup(read_file(*coarse));
      SearchOptions opt;
      opt.depth = *depth;
      opt.slopes = parse_list(*slopes);
      const auto rep = is_finer(f, g, opt);
      std::string out = c.header().lines() + "verdict: " + to_string(rep.verdict) + "\n";
      for (std::size_t k = 0; k < rep.per_generator.size(); ++k) {
        const auto& m = rep.per_generator[k];
        out += "generator " + std::to_string(k) + " (" + g.generators[k].to_string() + "): ";
        if (m.witness) {
          out += "dominated by " + describe_chain(m.witness->chain, f) + " (" + to_string(m.witness->verdict) + ")";
        } else if (m.refutation) {
          out += std::string("refuted") + (m.refutation->all_depths ? " at all depths" : " up to the search depth") +
                 ": " + m.refutation->reason;
        } else {
          out += "undecided after " + std::to_string(m.chains_tried) + " chains";
        }
        out += "\n";
      }
      c.sink().write(out);
      return rep.verdict == Verdict3::yes ? ok : verification_failed;
    };
  });
}

void register_fn(CLI::App& app, Common& c, std::function<int()>& run) {
  auto* fn = app.add_subcommand("fn", "Control function helpers");
  fn->require_subcommand(1);
  {
    auto* cmd = fn->add_subcommand("eval", "Evaluate at rational points");
    auto expr = std::make_shared<std::string>(), at = std::make_shared<std::string>();
    cmd->add_option("expr", *expr, "Function expression")->required();
    cmd->add_option("--at", *at, "Comma-separated points")->required();
    add_common(cmd, c);
    cmd->callback([&, expr, at] {
      run = [&, expr, at] {
        const auto f = ControlFunction::parse(*expr);
        std::string out = c.header().lines() + "x,f(x)\n";
        for (const auto& x : parse_list(*at)) out += to_string(x) + "," + to_string(f.evaluate(x)) + "\n";
        c.sink().write(out);
        return ok;
      };
    });
  }
  {
    auto* cmd = fn->add_subcommand("dominates", "Does F eventually dominate G?");
    auto f = std::make_shared<std::string>(), g = std::make_shared<std::string>();
    auto scale = std::make_shared<std::string>("large");
    auto strict = std::make_shared<bool>(false);
    cmd->add_option("f", *f, "Dominating candidate")->required();
    cmd->add_option("g", *g, "Dominated candidate")->required();
    cmd->add_option("--scale", *scale, "large, small or global")->capture_default_str();
    cmd->add_flag("--strict", *strict, "Require f > g");
    add_common(cmd, c);
    cmd->callback([&, f, g, scale, strict] {
      run = [&, f, g, scale, strict] {
        const auto v = eventually_dominates(ControlFunction::parse(*f), ControlFunction::parse(*g),
                                            parse_scale(*scale), *strict ? Strictness::strict : Strictness::non_strict);
        c.sink().write(c.header().lines() + "verdict: " + to_string(v) + "\n");
        return v.is_yes() ? ok : verification_failed;
      };
    });
  }
  {
    auto* cmd = fn->add_subcommand("control", "Is the function a dim-control function (f(x) >= x at the given end)?");
    auto expr = std::make_shared<std::string>();
    auto scale = std::make_shared<std::string>("large");
    cmd->add_option("expr", *expr, "Function expression")->required();
    cmd->add_option("--scale", *scale, "large, small or global")->capture_default_str();
    add_common(cmd, c);
    cmd->callback([&, expr, scale] {
      run = [&, expr, scale] {
        const auto cert = is_dim_control(ControlFunction::parse(*expr), parse_scale(*scale));
        std::string out = c.header().lines() + "dim_control: " + yes_no(cert.holds) + "\n";
        if (cert.large_threshold) out += "large_threshold: " + to_string(*cert.large_threshold) + "\n";
        if (cert.small_radius) out += "small_radius: " + to_string(*cert.small_radius) + "\n";
        if (!cert.reason.empty()) out += "reason: " + cert.reason + "\n";
        c.sink().write(out);
        return cert.holds ? ok : verification_failed;
      };
    });
  }
}

// ---------------------------------------------------------------------------
// maps

void register_maps(CLI::App& app, Common& c, std::function<int()>& run) {
  {
    auto* embed = app.add_subcommand("embed", "Coarse embedding checks");
    embed->require_subcommand(1);
    auto* cmd = embed->add_subcommand("verify", "Check rho_-(d) <= d(f x, f y) <= rho_+(d) on every pair");
    auto file = std::make_shared<std::string>();
    auto lo = std::make_shared<std::string>("id"), hi = std::make_shared<std::string>("id");
    cmd->add_option("map", *file, "Map file")->required();
    cmd->add_option("--rho-minus", *lo, "Contraction")->capture_default_str();
    cmd->add_option("--rho-plus", *hi, "Dilatation")->capture_default_str();
    add_common(cmd, c);
    cmd->callback([&, file, lo, hi] {
      run = [&, file, lo, hi] {
        const auto m = load_map(*file);
        const auto w = verify_embedding(m.map, ControlFunction::parse(*lo), ControlFunction::parse(*hi));
        std::string out = c.header().lines() + "verified: " + yes_no(w.verified) + "\n";
        if (w.failure) out += "failure: " + w.failure->describe(m.map) + "\n";
        c.sink().write(out);
        return w.verified ? ok : verification_failed;
      };
    });
  }
  {
    auto* cmd = app.add_subcommand("ultrametrize", "Single-linkage ultrametric over the same points");
    auto file = std::make_shared<std::string>();
    cmd->add_option("space", *file, "Space file")->required();
    add_common(cmd, c);
    cmd->callback([&, file] {
      run = [&, file] {
        const auto [du, rep] = ultrametrize(load_space(*file));
        std::string extra = "# ultrametric: " + yes_no(rep.ultrametric) + "\n# below: " + yes_no(rep.below) +
                            "\n# controlled: " + yes_no(rep.controlled) + "\n";
        emit_space(c, du, extra);
        return rep.ok() ? ok : verification_failed;
      };
    });
  }
  {
    auto* cmd = app.add_subcommand("lomega", "Embed an ultrametric space into L_omega");
    auto file = std::make_shared<std::string>();
    cmd->add_option("space", *file, "Ultrametric space file")->required();
    add_common(cmd, c);
    cmd->callback([&, file] {
      run = [&, file] {
        const auto e = embed_lomega(load_space(*file));
        std::string extra = "# window_start: " + std::to_string(e.window_start) + "\n# c1: " + to_string(e.c1) +
                            "\n# c2: " + to_string(e.c2) + "\n# certified: " + yes_no(e.certified) + "\n";
        emit_space(c, e.map.target(), extra);
        return e.certified ? ok : verification_failed;
      };
    });
  }
  {
    auto* cmd = app.add_subcommand("mapdim", "m-dimensional control value D_f(r, R) of a map");
    auto file = std::make_shared<std::string>();
    auto m = std::make_shared<std::size_t>(0);
    auto r = std::make_shared<std::string>("1"), big_r = std::make_shared<std::string>("1");
    auto clique_cap = std::make_shared<std::size_t>(20000);
    cmd->add_option("map", *file, "Map file")->required();
    cmd->add_option("--m", *m, "Colors minus one")->capture_default_str();
    cmd->add_option("--r", *r, "Source scale r")->capture_default_str();
    cmd->add_option("--R", *big_r, "Target bound R")->capture_default_str();
    cmd->add_option("--clique-cap", *clique_cap, "Most maximal cliques to enumerate")->capture_default_str();
    add_common(cmd, c);
    cmd->callback([&, file, m, r, big_r, clique_cap] {
      run = [&, file, m, r, big_r, clique_cap] {
        const auto lm = load_map(*file);
        MapControlOptions opt;
        opt.clique_cap = *clique_cap;
        opt.solve = c.solve();
        const auto sample = map_dim_control(lm.map, *m, parse_rational(*r), parse_rational(*big_r), opt);
        std::string out = c.header().lines();
        out += "m: " + std::to_string(sample.m) + "\nr: " + to_string(sample.r) + "\nR: " + to_string(sample.big_r) +
               "\nvalue: " + to_string(sample.value) + "\nsubsets: " + std::to_string(sample.subsets.size()) + "\n";
        for (std::size_t k = 0; k < sample.subsets.size(); ++k) {
          const auto& sub = sample.subsets[k];
          out += "subset " + std::to_string(k) + (k == sample.worst ? " (worst)" : "") +
                 ": bound " + to_string(sub.bound) + ", points";
          for (auto p : sub.points) out += " " + lm.map.source().label(p);
          out += "\n";
        }
        c.sink().write(out);
        return ok;
      };
    });
  }
  {
    auto* cmd = app.add_subcommand("hurewicz", "Assemble a (m+1)(n+1)-colored cover and compare with exact D_{m+n}");
    auto file = std::make_shared<std::string>();
    auto m = std::make_shared<std::size_t>(0), n = std::make_shared<std::size_t>(0);
    auto scales = std::make_shared<std::string>("auto");
    cmd->add_option("map", *file, "Map file")->required();
    cmd->add_option("--m", *m, "Colors per fiber minus one")->capture_default_str();
    cmd->add_option("--n", *n, "Colors on the target minus one")->capture_default_str();
    cmd->add_option("--scales", *scales, "'auto' or a strictly increasing list")->capture_default_str();
    add_common(cmd, c);
    cmd->callback([&, file, m, n, scales] {
      run = [&, file, m, n, scales] {
        const auto lm = load_map(*file);
        const auto rep = hurewicz_check(lm.map, *m, *n, parse_scales(*scales, lm.map.source()), c.solve());
        std::string out = c.header().lines();
        out += "s,dilatation,target_bound,target_method,fiber_bound,assembled_bound,assembled_valid,exact_bound,"
               "exact_le_assembled,status\n";
        for (const auto& row : rep.rows) {
          out += to_string(row.s) + "," + to_string(row.dilatation) + "," + to_string(row.target_bound) + "," +
                 to_string(row.target_method) + "," + to_string(row.fiber_bound) + "," +
                 to_string(row.assembled_bound) + "," + yes_no(row.assembled_valid) + "," +
                 (row.exact_bound ? to_string(*row.exact_bound) : "") + "," + yes_no(row.exact_le_assembled) + "," +
                 row.status + "\n";
        }
        c.sink().write(out);
        return rep.ok() ? ok : verification_failed;
      };
    });
  }
}

void register_suite(CLI::App& app, Common& c, std::function<int()>& run) {
  auto* cmd = app.add_subcommand("suite", "Run the acceptance criteria");
  auto ids = std::make_shared<std::vector<int>>();
  cmd->add_option("--criterion", *ids, "Run only these criteria (repeatable)")
      ->check(CLI::Range(1, scdim::acceptance::criterion_count));
  add_common(cmd, c);
  cmd->callback([&, ids] {
    run = [&, ids] {
      std::string out = c.header().lines();
      bool all = true;
      // Progress goes to stdout as it happens only when there is no output file.
      const bool live = !c.output;
      if (live) std::cout << out << std::flush;
      scdim::acceptance::run_criteria(*ids, [&](const scdim::acceptance::CriterionResult& r) {
        const std::string line = scdim::acceptance::format_result(r) + "\n";
        all = all && r.passed();
        if (live) {
          std::cout << line << std::flush;
        } else {
          out += line;
        }
      });
      if (!live) c.sink().write(out);
      return all ? ok : verification_failed;
    };
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Controlled asymptotic dimension toolkit: generate finite metric spaces, sample dimension "
               "profiles, classify growth, and check coarse maps.\n"
               "Exit codes: 0 success, 1 verification failure, 2 invalid input, 3 cap exceeded."};
  app.set_version_flag("--version", std::string("scdim ") + SCDIM_VERSION);
  app.require_subcommand(1);

  Common common;
  common.config = join_args(argc, argv);
  std::function<int()> run;
  register_gen(app, common, run);
  register_profile(app, common, run);
  register_classify(app, common, run);
  register_cover(app, common, run);
  register_semigroup(app, common, run);
  register_fn(app, common, run);
  register_maps(app, common, run);
  register_suite(app, common, run);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : invalid_input;
  }
  if (!run) return invalid_input;
  try {
    return run();
  } catch (const CapExceeded& e) {
    std::cerr << "cap exceeded: " << e.what() << "\n";
    return cap_exceeded;
  } catch (const InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return invalid_input;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return invalid_input;
  }
}
