#include "constshape/transform.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "constshape/recognizability.hpp"

namespace constshape {

Substitution power(const Substitution& sub, int n) {
  if (n < 1) fail(ErrorCode::Schema, "power level must be at least 1");
  if (n == 1) return sub;
  PointSet fn = support_iterate(sub.sys, n);
  Substitution out;
  out.alphabet = sub.alphabet;
  out.sys = make_system(sub.sys.L.pow(n), fn);
  out.doc_support.assign(fn.begin(), fn.end());
  out.rules.reserve(sub.rules.size());
  for (int a = 0; a < sub.letter_count(); ++a) {
    Pattern img = iterate(sub, a, n);
    if (!(img.support == out.sys.F1))
      fail(ErrorCode::Internal, "iterated rule support differs from F_n");
    out.rules.push_back(img.cells);
  }
  return out;
}

namespace {

BlockMap identity_letter_map(const std::vector<std::string>& alphabet, int dim) {
  BlockMap m;
  m.source_alphabet = alphabet;
  m.target_alphabet = alphabet;
  PointSet s(dim);
  s.insert(Vec::zero(dim));
  m.support = s;
  for (int a = 0; a < static_cast<int>(alphabet.size()); ++a) m.table[{a}] = a;
  return m;
}

}  // namespace

ChangeSupportResult change_support(const Substitution& sub, const PointSet& g1,
                                   int verify_radius) {
  ChangeSupportResult res;
  DomainReport dr = check_fundamental_domain(sub.sys.L, g1);
  if (!dr.ok) fail(ErrorCode::BadDomain, "G1: " + dr.message);

  if (g1 == sub.sys.F1) {
    res.out = sub;
    res.maps.forward = identity_letter_map(sub.alphabet, sub.dim());
    res.maps.backward = res.maps.forward;
    res.B = PointSet(sub.dim());
    res.B.insert(Vec::zero(sub.dim()));
    res.identity_shortcut = true;
    return res;
  }

  ExpansionSystem gsys = make_system(sub.sys.L, g1);
  FolnerVerdict vf = decide_folner(sub.sys);
  if (!vf.is_folner) fail(ErrorCode::NotFolner, "source support sequence is not Folner");
  FolnerVerdict vg = decide_folner(gsys);
  if (!vg.is_folner) fail(ErrorCode::NotFolner, "target support sequence is not Folner");

  KResult k2 = compute_K(gsys);
  PointSet a_set = compute_A_supportchange(sub.sys, g1);
  res.B = k2.K.sum(a_set);
  std::string why;
  if (!verify_supportchange_inclusions(sub.sys, g1, k2.K, a_set, 3, &why))
    fail(ErrorCode::Internal, "support-change inclusions failed: " + why);

  LanguageEngine eng(sub);
  std::vector<Pattern> letters = eng.over(res.B);
  std::map<std::vector<int>, int> letter_index;
  for (std::size_t i = 0; i < letters.size(); ++i)
    letter_index.emplace(letters[i].cells, static_cast<int>(i));

  Substitution out;
  out.sys = gsys;
  out.doc_support.assign(g1.begin(), g1.end());
  out.alphabet.reserve(letters.size());
  for (std::size_t i = 0; i < letters.size(); ++i) out.alphabet.push_back(std::to_string(i));
  out.rules.assign(letters.size(), std::vector<int>(g1.size(), -1));
  for (std::size_t i = 0; i < letters.size(); ++i) {
    Pattern img = substitute_pattern(sub, letters[i]);
    for (std::size_t gi = 0; gi < g1.size(); ++gi) {
      Pattern cell = img.restrict_to(res.B.translate(g1[gi])).translate(-g1[gi]);
      auto it = letter_index.find(cell.cells);
      if (it == letter_index.end())
        fail(ErrorCode::Internal, "rule cell is not a language pattern over B");
      out.rules[i][gi] = it->second;
    }
  }
  res.out = out;

  res.maps.forward.source_alphabet = sub.alphabet;
  res.maps.forward.target_alphabet = out.alphabet;
  res.maps.forward.support = res.B;
  for (std::size_t i = 0; i < letters.size(); ++i)
    res.maps.forward.table[letters[i].cells] = static_cast<int>(i);

  res.maps.backward.source_alphabet = out.alphabet;
  res.maps.backward.target_alphabet = sub.alphabet;
  PointSet zero(sub.dim());
  zero.insert(Vec::zero(sub.dim()));
  res.maps.backward.support = zero;
  int zero_idx = res.B.index_of(Vec::zero(sub.dim()));
  if (zero_idx < 0) fail(ErrorCode::Internal, "0 missing from B");
  for (std::size_t i = 0; i < letters.size(); ++i)
    res.maps.backward.table[{static_cast<int>(i)}] = letters[i].cells[static_cast<std::size_t>(zero_idx)];

  auto [prim, pk] = is_primitive(out);
  (void)pk;
  if (!prim) fail(ErrorCode::Internal, "support-change output lost primitivity");

  // Round trip and one-step commutation, verified on a window.
  {
    std::vector<GermSeed> seeds;
    for (int pm = 2; seeds.empty() && pm <= 64; pm *= 2) seeds = periodic_seeds(eng, pm);
    int pad = static_cast<int>(std::ceil(res.B.norm_max())) + 2;
    PointSet big = ball_points(verify_radius + 2 * pad, sub.dim());
    Grid x = expand_seed_grid(sub, seeds.front(), big);
    Grid y = res.maps.forward.apply_grid(x);
    Grid back = res.maps.backward.apply_grid(y);
    for (const Vec& q : ball_points(verify_radius, sub.dim()))
      if (back.get_checked(q) != x.get_checked(q) || x.get_checked(q) < 0)
        fail(ErrorCode::Internal, "backward after forward is not the identity on the window");
    // forward(zeta(x)) == out(forward(x)) on the window interior.
    Grid zx = substitute_grid(sub, x);
    Grid fzx = res.maps.forward.apply_grid(zx);
    Grid fy = substitute_grid(out, y);
    for (const Vec& q : ball_points(verify_radius, sub.dim())) {
      int lhs = fzx.get_checked(q), rhs = fy.get_checked(q);
      if (lhs < 0 || rhs < 0 || lhs != rhs)
        fail(ErrorCode::Internal, "support-change maps do not intertwine the substitutions");
    }
    res.verified_window = verify_radius;
  }
  return res;
}

InjectivizeResult injectivize(const Substitution& sub) {
  InjectivizeResult res;
  res.letter_map.resize(static_cast<std::size_t>(sub.letter_count()));
  for (int a = 0; a < sub.letter_count(); ++a) res.letter_map[static_cast<std::size_t>(a)] = a;

  Substitution cur = sub;
  while (true) {
    std::map<std::vector<int>, int> first_with_rule;
    std::vector<int> merge(static_cast<std::size_t>(cur.letter_count()), -1);
    bool collision = false;
    for (int a = 0; a < cur.letter_count(); ++a) {
      auto [it, fresh] = first_with_rule.emplace(cur.rules[static_cast<std::size_t>(a)], a);
      merge[static_cast<std::size_t>(a)] = it->second;
      if (!fresh) collision = true;
    }
    if (!collision) break;
    ++res.steps;

    std::vector<int> new_index(static_cast<std::size_t>(cur.letter_count()), -1);
    Substitution next;
    next.sys = cur.sys;
    next.doc_support = cur.doc_support;
    for (int a = 0; a < cur.letter_count(); ++a) {
      if (merge[static_cast<std::size_t>(a)] != a) continue;
      new_index[static_cast<std::size_t>(a)] = next.letter_count();
      next.alphabet.push_back(cur.alphabet[static_cast<std::size_t>(a)]);
    }
    for (int a = 0; a < cur.letter_count(); ++a) {
      if (merge[static_cast<std::size_t>(a)] != a) continue;
      std::vector<int> rule = cur.rules[static_cast<std::size_t>(a)];
      for (int& v : rule) v = new_index[static_cast<std::size_t>(merge[static_cast<std::size_t>(v)])];
      next.rules.push_back(rule);
    }
    for (int a = 0; a < sub.letter_count(); ++a) {
      int cur_letter = res.letter_map[static_cast<std::size_t>(a)];
      res.letter_map[static_cast<std::size_t>(a)] =
          new_index[static_cast<std::size_t>(merge[static_cast<std::size_t>(cur_letter)])];
    }
    cur = next;
  }
  res.out = cur;

  res.maps.forward.source_alphabet = sub.alphabet;
  res.maps.forward.target_alphabet = cur.alphabet;
  PointSet zero(sub.dim());
  zero.insert(Vec::zero(sub.dim()));
  res.maps.forward.support = zero;
  for (int a = 0; a < sub.letter_count(); ++a)
    res.maps.forward.table[{a}] = res.letter_map[static_cast<std::size_t>(a)];

  if (res.steps == 0) {
    res.maps.backward = identity_letter_map(sub.alphabet, sub.dim());
    return res;
  }

  // Backward decoder. Letters merged by the total coding have equal s-step
  // images under the original substitution, so a point decodes through s
  // one-step decompositions of the (injective) output substitution: the
  // original cell at 0 is the s-step rule of any coded preimage, read at the
  // accumulated shift.
  const int s = res.steps;
  std::vector<Pattern> rho(static_cast<std::size_t>(cur.letter_count()));
  for (int a = 0; a < sub.letter_count(); ++a) {
    std::size_t b = static_cast<std::size_t>(res.letter_map[static_cast<std::size_t>(a)]);
    Pattern img = iterate(sub, a, s);
    if (rho[b].support.empty())
      rho[b] = img;
    else if (!(rho[b] == img))
      fail(ErrorCode::Internal, "merged letters disagree after the full merge depth");
  }

  LanguageEngine eng_out(cur);
  EmpiricalRecog er = empirical_recognizability(eng_out, 20, 12);
  if (!er.r_pass) fail(ErrorCode::WindowTooSmall, "no empirical recognizability radius found");
  int pad = *er.r_pass + static_cast<int>(std::ceil(cur.sys.mat_norm + cur.sys.F1.norm_max())) + 2;
  double radius = pad;
  for (int i = 1; i < s; ++i) radius = cur.sys.mat_norm * radius + pad;
  PointSet sup = ball_points(radius, sub.dim());

  BlockMap dec;
  dec.source_alphabet = cur.alphabet;
  dec.target_alphabet = sub.alphabet;
  dec.support = sup;
  for (const Pattern& w : eng_out.over(sup)) {
    Pattern window = w;
    Vec shift = Vec::zero(sub.dim());
    Mat l_pow = Mat::identity(sub.dim());
    for (int i = 0; i < s; ++i) {
      Desubstitution d = desubstitute(cur, window, 0);
      shift = shift + l_pow.apply(d.shift);
      l_pow = l_pow * sub.sys.L;
      window = d.preimage;
    }
    // x = S^shift zeta^s(x_s) with the coded x_s equal to `window`.
    Vec q = shift;
    std::vector<int> digits;
    for (int i = 0; i < s; ++i) {
      auto [qq, fi] = digit_strip(sub.sys, q);
      digits.push_back(fi);
      q = qq;
    }
    std::vector<Vec> ds;
    for (int fi : digits) ds.push_back(sub.sys.F1[static_cast<std::size_t>(fi)]);
    Vec f = compose_digits(sub.sys, ds);
    dec.table[w.cells] = rho[static_cast<std::size_t>(window.at(q))].at(f);
  }
  res.maps.backward = dec;
  return res;
}

}  // namespace constshape
