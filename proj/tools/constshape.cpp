#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "constshape/factor.hpp"
#include "constshape/io.hpp"
#include "constshape/limits.hpp"

namespace cs = constshape;

namespace {

struct GlobalOpts {
  bool json = false;
  std::string seed;  // recorded, all algorithms are deterministic
};

cs::PointSet parse_points(const std::string& text, int dim = -1) {
  cs::Json j = cs::Json::parse(text, nullptr, false);
  if (j.is_discarded()) cs::fail(cs::ErrorCode::Schema, "point list is not valid JSON");
  return cs::pointset_from_json(j, dim);
}

std::vector<cs::Vec> parse_word(const std::string& text, int dim) {
  // "0,1;1,0;-1,-1" -> vectors
  std::vector<cs::Vec> out;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) return;
    std::vector<cs::Coord> xs;
    std::string num;
    for (char c : cur + ",") {
      if (c == ',') {
        xs.push_back(std::stoll(num));
        num.clear();
      } else {
        num += c;
      }
    }
    cs::Vec v = cs::Vec::of(xs);
    if (v.dim != dim) cs::fail(cs::ErrorCode::Schema, "word letter has the wrong dimension");
    out.push_back(v);
    cur.clear();
  };
  for (char c : text) {
    if (c == ';')
      flush();
    else if (!std::isspace(static_cast<unsigned char>(c)))
      cur += c;
  }
  flush();
  return out;
}

void emit(const GlobalOpts& g, const cs::Json& j, const std::string& text) {
  if (g.json) {
    cs::Json out = j;
    if (!g.seed.empty()) out["seed"] = g.seed;
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << text;
    if (!g.seed.empty()) std::cout << "seed: " << g.seed << " (recorded; unused)\n";
  }
}

cs::Json ratio_json(const cs::Ratio& r) {
  cs::Json j;
  j["num"] = r.num;
  j["den"] = r.den;
  return j;
}

cs::Json folner_json(const cs::FolnerVerdict& v) {
  cs::Json j;
  j["is_folner"] = v.is_folner;
  cs::Json word = cs::Json::array();
  for (const cs::Vec& l : v.word) word.push_back(cs::vec_to_json(l));
  j["word"] = word;
  j["n"] = v.n;
  if (v.witness_f) j["witness_f"] = cs::vec_to_json(*v.witness_f);
  j["state_count"] = v.state_count;
  j["cerny_style_bound"] = v.cerny_style_bound;
  j["word_length_bound"] = v.word_length_bound;
  j["witness_verified"] = v.witness_verified;
  if (!v.note.empty()) j["note"] = v.note;
  return j;
}

std::string magnitude_text(const cs::Magnitude& m) { return m.str(); }

int run(int argc, char** argv) {
  CLI::App app{"decision procedures and constructions for constant-shape substitutions"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOpts g;
  app.add_flag("--json", g.json, "emit a JSON document instead of text");
  app.add_option("--seed", g.seed, "recorded in the output; all algorithms are deterministic");
  std::size_t max_points = 0, max_patterns = 0, max_cells = 0;
  app.add_option("--max-points", max_points, "cap on explicit point sets");
  app.add_option("--max-patterns", max_patterns, "cap on pattern collections");
  app.add_option("--max-cells", max_cells, "cap on dense windows");
  app.parse_complete_callback([&] {
    if (const char* e = std::getenv("CONSTSHAPE_MAX_POINTS"); e && !max_points)
      max_points = std::strtoull(e, nullptr, 10);
    if (const char* e = std::getenv("CONSTSHAPE_MAX_PATTERNS"); e && !max_patterns)
      max_patterns = std::strtoull(e, nullptr, 10);
    if (const char* e = std::getenv("CONSTSHAPE_MAX_CELLS"); e && !max_cells)
      max_cells = std::strtoull(e, nullptr, 10);
    if (max_points) cs::limits().max_points = max_points;
    if (max_patterns) cs::limits().max_patterns = max_patterns;
    if (max_cells) cs::limits().max_cells = max_cells;
  });

  int exit_code = 0;

  // validate ------------------------------------------------------------
  {
    auto* c = app.add_subcommand("validate", "run all checks on a substitution document");
    auto file = std::make_shared<std::string>();
    c->add_option("file", *file, "substitution document")->required();
    c->callback([&, file] {
      cs::Substitution sub = cs::load_substitution(*file);
      cs::ValidationReport rep = cs::validate(sub);
      cs::Json j;
      j["ok"] = rep.ok;
      cs::Json checks = cs::Json::object();
      for (auto& [name, ok] : rep.checks) checks[name] = ok;
      j["checks"] = checks;
      j["warnings"] = rep.warnings;
      j["message"] = rep.message;
      std::ostringstream os;
      for (auto& [name, ok] : rep.checks)
        os << (ok ? "[ ok ] " : "[FAIL] ") << name << "\n";
      for (const std::string& w : rep.warnings) os << "[warn] " << w << "\n";
      os << (rep.ok ? "valid\n" : rep.message + "\n");
      emit(g, j, os.str());
      if (!rep.ok) exit_code = 1;
    });
  }

  // folner ----------------------------------------------------------------
  {
    auto* c = app.add_subcommand("folner", "decide the Folner property of the supports");
    auto file = std::make_shared<std::string>();
    auto bmode = std::make_shared<std::string>("ball");
    auto mode = std::make_shared<std::string>("auto");
    auto cover = std::make_shared<std::string>("fixpoint");
    auto word = std::make_shared<std::string>();
    c->add_option("file", *file)->required();
    c->add_option("--b-set", *bmode, "ball (default) or kset");
    c->add_option("--cover", *cover,
                  "fixpoint (default, the sound decision graph) or first-iterate (the small worked graph)");
    c->add_option("--mode", *mode, "auto, exact or greedy");
    c->add_option("--word", *word, "verify this word instead of searching, e.g. \"0,1;1,0\"");
    auto dump_graph = std::make_shared<std::string>();
    c->add_option("--graph", *dump_graph, "write the graph (edges or dot) to this file");
    c->callback([&, file, bmode, mode, cover, word, dump_graph] {
      cs::Substitution sub = cs::load_substitution(*file);
      cs::CoreSets sets = cs::core_sets(sub.sys);
      if (*cover == "first-iterate") {
        cs::PointSet a0(sub.dim());
        a0.insert(cs::Vec::zero(sub.dim()));
        sets.C = cs::covering_first_iterate(sub.sys, a0, sub.sys.F1.sum(sub.sys.F1));
      }
      cs::PointSet b = *bmode == "kset"
                           ? sets.K
                           : cs::ball_points(std::max(sub.sys.r_bar, sets.K.norm_max()),
                                             sub.dim());
      cs::SyncMode sm = *mode == "greedy" ? cs::SyncMode::Greedy : cs::SyncMode::Exact;
      if (*mode == "auto") sm = sets.C.sum(b).size() <= 22 ? cs::SyncMode::Exact : cs::SyncMode::Greedy;
      std::optional<std::vector<cs::Vec>> forced;
      if (!word->empty()) forced = parse_word(*word, sub.dim());
      cs::SyncGraph graph = cs::build_graph(sub.sys, b, sets.K, sets.C);
      cs::FolnerVerdict v;
      if (*cover == "first-iterate") {
        // Word search and witness on the supplied graph; the sound verdict
        // itself always comes from the fixpoint graph.
        v.state_count = graph.state_count();
        {
          double six_r = 6.0 * sub.sys.r_bar;
          std::ostringstream os1;
          os1.precision(0);
          os1 << std::fixed
              << std::ceil((std::pow(six_r, 3 * sub.dim()) - std::pow(six_r, sub.dim())) / 6.0);
          v.cerny_style_bound = os1.str();
          double nn = static_cast<double>(graph.state_count());
          std::ostringstream os2;
          os2.precision(0);
          os2 << std::fixed << (nn * nn * nn - nn) / 6.0;
          v.word_length_bound = os2.str();
        }
        std::optional<std::vector<int>> w;
        if (forced) {
          std::vector<int> letters;
          for (const cs::Vec& l : *forced) letters.push_back(graph.alphabet.index_of(l));
          if (cs::word_synchronizes(graph, letters)) w = letters;
        } else {
          w = cs::find_sync_word(graph, sm);
        }
        if (w) {
          v.is_folner = true;
          v.word = cs::word_letters(graph, *w);
          v.n = static_cast<int>(v.word.size());
          v.witness_f = cs::compose_digits(sub.sys, v.word);
          v.witness_verified = true;
          for (const cs::Vec& s : graph.states)
            v.witness_verified &= cs::in_support_level(sub.sys, *v.witness_f + s, v.n);
          v.note = "word found on the first-iterate graph";
        } else {
          v.is_folner = false;
          v.note = forced ? "forced word does not synchronize"
                          : "no synchronizing word on the first-iterate graph";
        }
      } else {
        v = cs::decide_folner(sub.sys, b, sm, forced ? &*forced : nullptr);
      }
      if (!dump_graph->empty()) {
        std::string text = dump_graph->size() > 4 &&
                                   dump_graph->substr(dump_graph->size() - 4) == ".dot"
                               ? cs::graph_dot(graph)
                               : cs::graph_edge_list(graph);
        cs::write_file(*dump_graph, text);
      }
      std::ostringstream os;
      os << (v.is_folner ? "Folner: yes" : "Folner: no") << " (states: " << v.state_count
         << ")\n";
      if (v.is_folner) {
        os << "word:";
        for (const cs::Vec& l : v.word) os << " " << l.str();
        os << "\nwitness f = " << v.witness_f->str() << " in F_" << v.n
           << (v.witness_verified ? " (inclusion verified)" : "") << "\n";
      }
      if (!v.note.empty()) os << "note: " << v.note << "\n";
      os << "word-length bound (N^3-N)/6 = " << v.word_length_bound
         << ", index bound: " << v.cerny_style_bound << "\n";
      emit(g, folner_json(v), os.str());
      if (!v.is_folner) exit_code = 1;
    });
  }

  // kset ------------------------------------------------------------------
  {
    auto* c = app.add_subcommand("kset", "remainder set K");
    auto file = std::make_shared<std::string>();
    auto m_max = std::make_shared<int>(64);
    c->add_option("file", *file)->required();
    c->add_option("--m-max", *m_max);
    c->callback([&, file, m_max] {
      cs::Substitution sub = cs::load_substitution(*file);
      cs::KResult k = cs::compute_K(sub.sys, *m_max);
      cs::Json j;
      j["K"] = cs::pointset_to_json(k.K);
      j["j_stable"] = k.j_stable;
      j["note"] = k.note;
      emit(g, j, "K = " + k.K.str() + "\n" + k.note + "\n");
    });
  }

  // cset ------------------------------------------------------------------
  {
    auto* c = app.add_subcommand("cset", "covering set C");
    auto file = std::make_shared<std::string>();
    auto a_text = std::make_shared<std::string>();
    auto f_text = std::make_shared<std::string>();
    c->add_option("file", *file)->required();
    c->add_option("--a", *a_text, "the set A (default {0})");
    c->add_option("--f", *f_text, "the set F (default F1+F1)");
    c->callback([&, file, a_text, f_text] {
      cs::Substitution sub = cs::load_substitution(*file);
      cs::PointSet a(sub.dim());
      a.insert(cs::Vec::zero(sub.dim()));
      if (!a_text->empty()) a = parse_points(*a_text, sub.dim());
      cs::PointSet f = f_text->empty() ? sub.sys.F1.sum(sub.sys.F1)
                                       : parse_points(*f_text, sub.dim());
      cs::PointSet cset = cs::compute_C(sub.sys, a, f);
      std::string why;
      bool verified = cs::verify_covering_inclusions(sub.sys, a, f, cset, 3, &why);
      cs::Json j;
      j["C"] = cs::pointset_to_json(cset);
      j["inclusions_verified_to"] = verified ? 3 : -1;
      if (!verified) j["violation"] = why;
      emit(g, j,
           "C = " + cset.str() + "\n" +
               (verified ? "inclusions verified for n <= 3\n" : "violation: " + why + "\n"));
      if (!verified) exit_code = 1;
    });
  }

  // iterate -----------------------------------------------------------------
  {
    auto* c = app.add_subcommand("iterate", "n-th image of a letter");
    auto file = std::make_shared<std::string>();
    auto letter = std::make_shared<std::string>();
    auto n = std::make_shared<int>(1);
    c->add_option("file", *file)->required();
    c->add_option("letter", *letter)->required();
    c->add_option("n", *n)->required();
    c->callback([&, file, letter, n] {
      cs::Substitution sub = cs::load_substitution(*file);
      cs::Pattern p = cs::iterate(sub, sub.letter_index(*letter), *n);
      emit(g, cs::pattern_to_json(p, sub.alphabet, sub.dim()),
           cs::render_ascii(p, sub.alphabet));
    });
  }

  // render -------------------------------------------------------------------
  {
    auto* c = app.add_subcommand("render", "deterministic renderings");
    auto file = std::make_shared<std::string>();
    auto what = std::make_shared<std::string>("f1");
    auto n = std::make_shared<int>(1);
    auto letter = std::make_shared<std::string>();
    auto format = std::make_shared<std::string>("ascii");
    auto scale = std::make_shared<double>(256.0);
    c->add_option("file", *file)->required();
    c->add_option("--what", *what, "f1 | fn | rule | germ | tile");
    c->add_option("-n,--level", *n);
    c->add_option("--letter", *letter);
    c->add_option("--format", *format, "ascii | svg");
    c->add_option("--scale", *scale);
    c->callback([&, file, what, n, letter, format, scale] {
      cs::Substitution sub = cs::load_substitution(*file);
      std::string text;
      cs::Json j;
      if (*what == "tile") {
        text = cs::render_tile_svg(sub.sys, *n, *scale);
      } else if (*what == "f1" || *what == "fn") {
        cs::PointSet s = *what == "f1" ? sub.sys.F1 : cs::support_iterate(sub.sys, *n);
        text = cs::render_ascii_points(s);
        j["points"] = cs::pointset_to_json(s);
      } else if (*what == "rule") {
        cs::Pattern p = sub.rule_pattern(sub.letter_index(*letter));
        text = *format == "svg" ? cs::render_svg(p, sub.alphabet)
                                : cs::render_ascii(p, sub.alphabet);
        j = cs::pattern_to_json(p, sub.alphabet, sub.dim());
      } else if (*what == "germ") {
        std::vector<cs::GermSeed> seeds = cs::periodic_seeds(sub, 8);
        if (seeds.empty()) cs::fail(cs::ErrorCode::Internal, "no germ found");
        cs::Pattern p = seeds.front().germ;
        text = *format == "svg" ? cs::render_svg(p, sub.alphabet)
                                : cs::render_ascii(p, sub.alphabet);
        j = cs::pattern_to_json(p, sub.alphabet, sub.dim());
      } else {
        cs::fail(cs::ErrorCode::Schema, "unknown render target '" + *what + "'");
      }
      j["text"] = text;
      emit(g, j, text);
    });
  }

  // seeds ----------------------------------------------------------------------
  {
    auto* c = app.add_subcommand("seeds", "periodic germ seeds");
    auto file = std::make_shared<std::string>();
    auto p_max = std::make_shared<int>(2);
    c->add_option("file", *file)->required();
    c->add_option("--p-max", *p_max);
    c->callback([&, file, p_max] {
      cs::Substitution sub = cs::load_substitution(*file);
      std::vector<cs::GermSeed> seeds = cs::periodic_seeds(sub, *p_max);
      cs::Json j;
      cs::Json arr = cs::Json::array();
      std::ostringstream os;
      os << seeds.size() << " seeds with period <= " << *p_max << "\n";
      for (const cs::GermSeed& s : seeds) {
        cs::Json e = cs::pattern_to_json(s.germ, sub.alphabet, sub.dim());
        e["period"] = s.period;
        arr.push_back(e);
        os << "period " << s.period << ":\n"
           << cs::render_ascii(s.germ, sub.alphabet);
      }
      j["seeds"] = arr;
      emit(g, j, os.str());
    });
  }

  // language ---------------------------------------------------------------------
  {
    auto* c = app.add_subcommand("language", "language patterns over a support");
    auto file = std::make_shared<std::string>();
    auto radius = std::make_shared<double>(-1);
    auto support = std::make_shared<std::string>();
    c->add_option("file", *file)->required();
    c->add_option("--radius", *radius, "lattice ball support");
    c->add_option("--support", *support, "explicit support, e.g. [[0,0],[1,0]]");
    c->callback([&, file, radius, support] {
      cs::Substitution sub = cs::load_substitution(*file);
      cs::PointSet p = support->empty() ? cs::ball_points(*radius < 0 ? 1.0 : *radius, sub.dim())
                                        : parse_points(*support, sub.dim());
      cs::LanguageEngine eng(sub);
      std::vector<cs::Pattern> pats = eng.over(p);
      cs::Json j;
      j["support"] = cs::pointset_to_json(p);
      j["count"] = pats.size();
      cs::Json arr = cs::Json::array();
      for (const cs::Pattern& w : pats) arr.push_back(cs::pattern_to_json(w, sub.alphabet, sub.dim()));
      j["patterns"] = arr;
      emit(g, j, std::to_string(pats.size()) + " patterns\n");
    });
  }

  // complexity ----------------------------------------------------------------
  {
    auto* c = app.add_subcommand("complexity", "pattern counts on lattice balls");
    auto file = std::make_shared<std::string>();
    auto r = std::make_shared<double>(1);
    c->add_option("file", *file)->required();
    c->add_option("r", *r)->required();
    c->callback([&, file, r] {
      cs::Substitution sub = cs::load_substitution(*file);
      cs::LanguageEngine eng(sub);
      long long count = cs::complexity(eng, *r);
      cs::Magnitude bound = cs::complexity_bound(sub, eng.core_support(), *r);
      cs::Json j;
      j["r"] = *r;
      j["count"] = count;
      j["bound"] = magnitude_text(bound);
      emit(g, j,
           "p(" + std::to_string(*r) + ") = " + std::to_string(count) +
               "  (bound " + magnitude_text(bound) + ")\n");
    });
  }

  // repetitivity ---------------------------------------------------------------
  {
    auto* c = app.add_subcommand("repetitivity", "empirical repetitivity radius and bound");
    auto file = std::make_shared<std::string>();
    auto r = std::make_shared<int>(1);
    auto r_max = std::make_shared<int>(16);
    c->add_option("file", *file)->required();
    c->add_option("r", *r)->required();
    c->add_option("--r-max", *r_max);
    c->callback([&, file, r, r_max] {
      cs::Substitution sub = cs::load_substitution(*file);
      cs::LanguageEngine eng(sub);
      cs::RepetitivityResult res = cs::repetitivity(eng, *r, *r_max);
      cs::Json j;
      j["r"] = *r;
      j["r_emp"] = res.r_emp;
      j["r_bound"] = magnitude_text(res.r_bound);
      j["scanned_up_to"] = res.scanned_up_to;
      emit(g, j,
           "R_emp(" + std::to_string(*r) + ") = " + std::to_string(res.r_emp) + "  (bound " +
               magnitude_text(res.r_bound) + ")\n");
      if (res.r_emp < 0) exit_code = 3;
    });
  }

  // aperiodicity-scan ------------------------------------------------------------
  {
    auto* c = app.add_subcommand("aperiodicity-scan",
                                 "heuristic periodicity scan (evidence, not a decision)");
    auto file = std::make_shared<std::string>();
    auto radius = std::make_shared<int>(16);
    auto bound = std::make_shared<int>(8);
    c->add_option("file", *file)->required();
    c->add_option("--radius", *radius);
    c->add_option("--bound", *bound);
    c->callback([&, file, radius, bound] {
      cs::Substitution sub = cs::load_substitution(*file);
      cs::AperiodicityReport rep = cs::aperiodicity_scan(sub, *radius, *bound);
      cs::Json j;
      j["window_radius"] = rep.window_radius;
      j["period_bound"] = rep.period_bound;
      cs::Json arr = cs::Json::array();
      for (const cs::Vec& p : rep.consistent_periods) arr.push_back(cs::vec_to_json(p));
      j["consistent_periods"] = arr;
      std::ostringstream os;
      if (rep.consistent_periods.empty())
        os << "no period consistent on the window (aperiodicity evidence at this scale)\n";
      else {
        os << rep.consistent_periods.size() << " candidate periods:";
        for (const cs::Vec& p : rep.consistent_periods) os << " " << p.str();
        os << "\n";
      }
      emit(g, j, os.str());
      if (!rep.consistent_periods.empty()) exit_code = 1;
    });
  }

  // change-support -----------------------------------------------------------------
  {
    auto* c = app.add_subcommand("change-support", "rewrite onto another fundamental domain");
    auto file = std::make_shared<std::string>();
    auto g1 = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto verify_radius = std::make_shared<int>(16);
    c->add_option("file", *file)->required();
    c->add_option("--g1", *g1, "the new fundamental domain")->required();
    c->add_option("--out", *out, "write the new substitution document here");
    c->add_option("--verify-radius", *verify_radius);
    c->callback([&, file, g1, out, verify_radius] {
      cs::Substitution sub = cs::load_substitution(*file);
      cs::ChangeSupportResult res =
          cs::change_support(sub, parse_points(*g1, sub.dim()), *verify_radius);
      if (!out->empty()) cs::save_substitution(res.out, *out);
      cs::Json j;
      j["alphabet_size"] = res.out.alphabet.size();
      j["B"] = cs::pointset_to_json(res.B);
      j["identity_shortcut"] = res.identity_shortcut;
      j["verified_window"] = res.verified_window;
      j["substitution"] = cs::substitution_to_json(res.out);
      j["forward"] = cs::blockmap_to_json(res.maps.forward, sub.dim());
      j["backward"] = cs::blockmap_to_json(res.maps.backward, sub.dim());
      std::ostringstream os;
      os << "alphabet: " << res.out.alphabet.size() << " letters, B = " << res.B.str() << "\n";
      if (res.identity_shortcut) os << "identity shortcut (same support)\n";
      else os << "round trip verified on radius " << res.verified_window << "\n";
      emit(g, j, os.str());
    });
  }

  // injectivize -----------------------------------------------------------------
  {
    auto* c = app.add_subcommand("injectivize", "merge letters with identical images");
    auto file = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    c->add_option("file", *file)->required();
    c->add_option("--out", *out);
    c->callback([&, file, out] {
      cs::Substitution sub = cs::load_substitution(*file);
      cs::InjectivizeResult res = cs::injectivize(sub);
      if (!out->empty()) cs::save_substitution(res.out, *out);
      cs::Json j;
      j["steps"] = res.steps;
      j["alphabet_size"] = res.out.alphabet.size();
      j["letter_map"] = res.letter_map;
      j["substitution"] = cs::substitution_to_json(res.out);
      emit(g, j,
           "steps: " + std::to_string(res.steps) + ", letters: " +
               std::to_string(res.out.alphabet.size()) + "\n");
    });
  }

  // power ----------------------------------------------------------------------
  {
    auto* c = app.add_subcommand("power", "n-th power substitution");
    auto file = std::make_shared<std::string>();
    auto n = std::make_shared<int>(2);
    auto out = std::make_shared<std::string>();
    c->add_option("file", *file)->required();
    c->add_option("n", *n)->required();
    c->add_option("--out", *out);
    c->callback([&, file, n, out] {
      cs::Substitution sub = cs::load_substitution(*file);
      cs::Substitution p = cs::power(sub, *n);
      if (!out->empty()) cs::save_substitution(p, *out);
      emit(g, cs::substitution_to_json(p),
           "support size " + std::to_string(p.sys.F1.size()) + "\n");
    });
  }

  // recog-bound -------------------------------------------------------------------
  {
    auto* c = app.add_subcommand("recog-bound", "computable recognizability bound");
    auto file = std::make_shared<std::string>();
    auto variant = std::make_shared<std::string>("closed");
    c->add_option("file", *file)->required();
    c->add_option("--variant", *variant, "closed | repetitivity");
    c->callback([&, file, variant] {
      cs::Substitution sub = cs::load_substitution(*file);
      cs::RecogConstants rc = cs::recog_bound(
          sub, *variant == "repetitivity" ? cs::RecogVariant::RepetitivityBased
                                          : cs::RecogVariant::ClosedForm);
      cs::Json j;
      j["t"] = rc.t;
      j["r_bar"] = rc.r_bar;
      j["a"] = rc.a.str();
      j["R_bar"] = rc.R_bar.str();
      j["n_bar"] = rc.n_bar.str();
      j["bound"] = rc.bound.str();
      j["bound_log10"] = rc.bound_log10.str();
      std::ostringstream os;
      os << "t = " << rc.t << ", r_bar = " << rc.r_bar << "\n"
         << "a = " << rc.a.str() << "\n"
         << "R_bar = " << rc.R_bar.str() << "\n"
         << "n_bar = " << rc.n_bar.str() << "\n"
         << "bound = " << rc.bound.str() << "\n"
         << "log10(bound) = " << rc.bound_log10.str() << "\n";
      emit(g, j, os.str());
    });
  }

  // recog-empirical ------------------------------------------------------------------
  {
    auto* c = app.add_subcommand("recog-empirical", "empirical recognizability radius");
    auto file = std::make_shared<std::string>();
    auto window = std::make_shared<int>(32);
    auto r_max = std::make_shared<int>(16);
    c->add_option("file", *file)->required();
    c->add_option("--window", *window);
    c->add_option("--r-max", *r_max);
    c->callback([&, file, window, r_max] {
      cs::Substitution sub = cs::load_substitution(*file);
      cs::EmpiricalRecog er = cs::empirical_recognizability(sub, *window, *r_max);
      cs::Json j;
      j["window_radius"] = er.window_radius;
      j["r_fail_below"] = er.r_fail_below;
      if (er.r_pass) j["r_pass"] = *er.r_pass;
      j["pairs_tested"] = er.pairs_tested;
      std::ostringstream os;
      os << "largest failing R: " << er.r_fail_below << "\n";
      if (er.r_pass) os << "first passing R: " << *er.r_pass << "\n";
      else os << "no passing R up to " << *r_max << "\n";
      emit(g, j, os.str());
      if (!er.r_pass) exit_code = 1;
    });
  }

  // desubstitute ----------------------------------------------------------------------
  {
    auto* c = app.add_subcommand("desubstitute", "unique one-step decomposition of a window");
    auto file = std::make_shared<std::string>();
    auto pattern_file = std::make_shared<std::string>();
    auto margin = std::make_shared<int>(0);
    c->add_option("file", *file)->required();
    c->add_option("--pattern", *pattern_file)->required();
    c->add_option("--margin", *margin);
    c->callback([&, file, pattern_file, margin] {
      cs::Substitution sub = cs::load_substitution(*file);
      cs::Pattern w = cs::load_pattern(*pattern_file, sub);
      cs::Desubstitution d = cs::desubstitute(sub, w, *margin);
      cs::Json j;
      j["shift"] = cs::vec_to_json(d.shift);
      j["preimage"] = cs::pattern_to_json(d.preimage, sub.alphabet, sub.dim());
      emit(g, j,
           "shift " + d.shift.str() + "\n" + cs::render_ascii(d.preimage, sub.alphabet));
    });
  }

  // verify-factor ---------------------------------------------------------------------
  {
    auto* c = app.add_subcommand("verify-factor", "check the intertwining relation for a map");
    auto f1 = std::make_shared<std::string>();
    auto f2 = std::make_shared<std::string>();
    auto map_file = std::make_shared<std::string>();
    auto shift = std::make_shared<std::string>();
    auto level = std::make_shared<int>(1);
    c->add_option("sub1", *f1)->required();
    c->add_option("sub2", *f2)->required();
    c->add_option("--map", *map_file)->required();
    c->add_option("--shift", *shift, "e.g. \"0,0\"");
    c->add_option("--level", *level);
    c->callback([&, f1, f2, map_file, shift, level] {
      cs::Substitution s1 = cs::load_substitution(*f1);
      cs::Substitution s2 = cs::load_substitution(*f2);
      cs::BlockMap m = cs::load_blockmap(*map_file);
      cs::Vec f = cs::Vec::zero(s1.dim());
      if (!shift->empty()) f = parse_word(*shift, s1.dim()).front();
      bool ok = cs::verify_commutation(m, s1, s2, f, *level);
      cs::Json j;
      j["holds"] = ok;
      j["level"] = *level;
      j["shift"] = cs::vec_to_json(f);
      emit(g, j, ok ? "commutation holds\n" : "commutation fails\n");
      if (!ok) exit_code = 1;
    });
  }

  // search-factor --------------------------------------------------------------------
  {
    auto* c = app.add_subcommand("search-factor", "search block maps by constraint propagation");
    auto f1 = std::make_shared<std::string>();
    auto f2 = std::make_shared<std::string>();
    auto radius = std::make_shared<double>(0);
    auto support = std::make_shared<std::string>();
    auto level_budget = std::make_shared<int>(2);
    auto out = std::make_shared<std::string>();
    c->add_option("sub1", *f1)->required();
    c->add_option("sub2", *f2)->required();
    c->add_option("--radius", *radius);
    c->add_option("--support", *support);
    c->add_option("--level-budget", *level_budget);
    c->add_option("--out", *out, "write the certificates to this file");
    c->callback([&, f1, f2, radius, support, level_budget, out] {
      cs::Substitution s1 = cs::load_substitution(*f1);
      cs::Substitution s2 = cs::load_substitution(*f2);
      cs::PointSet p = support->empty() ? cs::ball_points(*radius, s1.dim())
                                        : parse_points(*support, s1.dim());
      std::vector<cs::FactorCertificate> found =
          cs::search_factors(s1, s2, p, *level_budget);
      cs::Json arr = cs::Json::array();
      for (const cs::FactorCertificate& cert : found) {
        cs::Json e;
        e["map"] = cs::blockmap_to_json(cert.map, s1.dim());
        e["level"] = cert.level;
        e["shift"] = cs::vec_to_json(cert.shift);
        e["hash"] = cert.hash;
        arr.push_back(e);
      }
      cs::Json j;
      j["count"] = found.size();
      j["certificates"] = arr;
      if (!out->empty()) cs::write_file(*out, j.dump(2) + "\n");
      emit(g, j, std::to_string(found.size()) + " certified maps\n");
      if (found.empty()) exit_code = 1;
    });
  }

  // decide-factor --------------------------------------------------------------------
  {
    auto* c = app.add_subcommand("decide-factor", "search for any factor map");
    auto f1 = std::make_shared<std::string>();
    auto f2 = std::make_shared<std::string>();
    auto radius_budget = std::make_shared<int>(1);
    auto level_budget = std::make_shared<int>(2);
    c->add_option("sub1", *f1)->required();
    c->add_option("sub2", *f2)->required();
    c->add_option("--radius-budget", *radius_budget);
    c->add_option("--level-budget", *level_budget);
    c->callback([&, f1, f2, radius_budget, level_budget] {
      cs::Substitution s1 = cs::load_substitution(*f1);
      cs::Substitution s2 = cs::load_substitution(*f2);
      cs::FactorDecision d = cs::decide_factorization(s1, s2, *radius_budget, *level_budget);
      cs::Json j;
      j["verdict"] = d.verdict == cs::FactorDecision::Verdict::Yes       ? "yes"
                     : d.verdict == cs::FactorDecision::Verdict::No      ? "no"
                                                                          : "unknown";
      j["bridged"] = d.bridged;
      if (d.certificate) {
        j["level"] = d.certificate->level;
        j["shift"] = cs::vec_to_json(d.certificate->shift);
        j["map"] = cs::blockmap_to_json(d.certificate->map, s1.dim());
      }
      if (!d.note.empty()) j["note"] = d.note;
      std::ostringstream os;
      os << "verdict: " << j["verdict"].get<std::string>() << "\n";
      if (!d.note.empty()) os << d.note << "\n";
      emit(g, j, os.str());
      if (d.verdict != cs::FactorDecision::Verdict::Yes) exit_code = 1;
    });
  }

  // conjugacy ----------------------------------------------------------------------
  {
    auto* c = app.add_subcommand("conjugacy", "invertibility of a certified map");
    auto f1 = std::make_shared<std::string>();
    auto f2 = std::make_shared<std::string>();
    auto map_file = std::make_shared<std::string>();
    auto radius_budget = std::make_shared<int>(1);
    auto level_budget = std::make_shared<int>(2);
    c->add_option("sub1", *f1)->required();
    c->add_option("sub2", *f2)->required();
    c->add_option("--map", *map_file)->required();
    c->add_option("--radius-budget", *radius_budget);
    c->add_option("--level-budget", *level_budget);
    c->callback([&, f1, f2, map_file, radius_budget, level_budget] {
      cs::Substitution s1 = cs::load_substitution(*f1);
      cs::Substitution s2 = cs::load_substitution(*f2);
      cs::BlockMap m = cs::load_blockmap(*map_file);
      cs::LanguageEngine eng(s1);
      auto cert = cs::certify_factor(m, s1, s2, *level_budget, eng);
      if (!cert) {
        emit(g, cs::Json{{"status", "not-certified"}}, "map does not certify\n");
        exit_code = 1;
        return;
      }
      cs::ConjugacyVerdict v = cs::check_conjugacy(*cert, s1, s2, *radius_budget, *level_budget);
      cs::Json j;
      j["status"] = v.status == cs::ConjugacyVerdict::Status::Conjugacy ? "conjugacy"
                    : v.status == cs::ConjugacyVerdict::Status::FactorOnly ? "factor-only"
                                                                           : "unknown";
      if (v.inverse) j["inverse"] = cs::blockmap_to_json(*v.inverse, s1.dim());
      j["note"] = v.note;
      emit(g, j, j["status"].get<std::string>() + ": " + v.note + "\n");
      if (v.status != cs::ConjugacyVerdict::Status::Conjugacy) exit_code = 1;
    });
  }

  // automorphisms -------------------------------------------------------------------
  {
    auto* c = app.add_subcommand("automorphisms", "census of invertible self-maps mod shift");
    auto file = std::make_shared<std::string>();
    auto radius = std::make_shared<double>(0);
    auto level_budget = std::make_shared<int>(2);
    c->add_option("file", *file)->required();
    c->add_option("--radius", *radius);
    c->add_option("--level-budget", *level_budget);
    c->callback([&, file, radius, level_budget] {
      cs::Substitution sub = cs::load_substitution(*file);
      std::vector<cs::FactorCertificate> census =
          cs::automorphism_census(sub, cs::ball_points(*radius, sub.dim()), *level_budget);
      cs::Json arr = cs::Json::array();
      for (const cs::FactorCertificate& cert : census)
        arr.push_back(cs::blockmap_to_json(cert.map, sub.dim()));
      cs::Json j;
      j["classes"] = census.size();
      j["maps"] = arr;
      emit(g, j, std::to_string(census.size()) + " classes modulo the shift\n");
    });
  }

  CLI11_PARSE(app, argc, argv);
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const cs::Error& e) {
    std::cerr << "error (" << cs::error_code_name(e.code()) << "): " << e.what() << "\n";
    switch (e.code()) {
      case cs::ErrorCode::Schema:
        return 2;
      case cs::ErrorCode::ResourceLimit:
      case cs::ErrorCode::NotStabilized:
      case cs::ErrorCode::IncompleteLanguage:
      case cs::ErrorCode::WindowTooSmall:
        return 3;
      case cs::ErrorCode::Internal:
        return 4;
      default:
        return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
}
