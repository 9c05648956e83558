#include "spray/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

#include "spray/errors.hpp"
#include "spray/summation.hpp"

namespace spray {

namespace {

// Network simplex for the dense balanced transportation problem.
//
// Nodes: sources 0..m-1, sinks m..m+n-1, artificial root m+n.  The initial
// basis is the star of artificial arcs (source -> root carrying the supply,
// root -> sink carrying the demand), which is strongly feasible because all
// flows are positive.  Artificial arcs have symbolic cost M (tracked as an
// integer multiple separate from the float part, so no big-M constant ever
// mixes into the arithmetic).  Entering arcs are found by block search over
// the real arcs; the leaving arc is the last blocking arc in cycle order
// from the apex, which preserves strong feasibility and rules out cycling.
// After the loop the solution is certified against the optimality conditions
// and rejected if anything fails.
class TransportSimplex {
 public:
  TransportSimplex(std::vector<double> supply, std::vector<double> demand,
                   const std::vector<double>& cost)
      : a_(std::move(supply)), b_(std::move(demand)), c_(cost),
        m_(static_cast<int>(a_.size())), n_(static_cast<int>(b_.size())),
        V_(m_ + n_ + 1), root_(m_ + n_) {
    max_cost_ = 0.0;
    for (double v : c_) max_cost_ = std::max(max_cost_, v);
    enter_tol_ = 1e-14 * max_cost_;
    cert_tol_ = 1e-12 * max_cost_;
  }

  struct Result {
    std::vector<TransportPlan::Entry> entries;
    double cost = 0.0;
  };

  Result solve() {
    init_basis();
    rebuild();
    long long cap = 200LL * (m_ + n_ + 2) + 100000;
    long long pivots = 0;
    int enter;
    while ((enter = price()) >= 0) {
      pivot(enter);
      rebuild();
      if (++pivots > cap) throw solver_error("transport: pivot limit exceeded");
    }
    return extract_certified();
  }

 private:
  struct BArc {
    int tail = 0;
    int head = 0;
    double flow = 0.0;
    bool artificial = false;
    double cost = 0.0;
  };

  std::vector<double> a_, b_;
  const std::vector<double>& c_;
  int m_, n_, V_, root_;
  double max_cost_, enter_tol_, cert_tol_;

  std::vector<BArc> basic_;        // m_ + n_ tree arcs
  std::vector<char> in_basis_;     // real arcs only, size m_ * n_
  std::vector<int> parent_, up_idx_, depth_, order_;
  std::vector<char> up_forward_;   // tree arc at node points node -> parent
  std::vector<int> pot_k_;         // potential, multiples of the symbolic M
  std::vector<double> pot_;        // potential, float part
  std::vector<int> adj_head_, adj_next_, adj_other_, adj_arc_;
  std::vector<char> seen_;
  int scan_ = 0;

  void init_basis() {
    basic_.resize(m_ + n_);
    for (int i = 0; i < m_; ++i) basic_[i] = {i, root_, a_[i], true, 0.0};
    for (int j = 0; j < n_; ++j) basic_[m_ + j] = {root_, m_ + j, b_[j], true, 0.0};
    in_basis_.assign(static_cast<std::size_t>(m_) * n_, 0);
    parent_.resize(V_);
    up_idx_.resize(V_);
    up_forward_.resize(V_);
    depth_.resize(V_);
    pot_k_.resize(V_);
    pot_.resize(V_);
    order_.reserve(V_);
    adj_head_.resize(V_);
    adj_next_.resize(2 * basic_.size());
    adj_other_.resize(2 * basic_.size());
    adj_arc_.resize(2 * basic_.size());
  }

  void rebuild() {
    std::fill(adj_head_.begin(), adj_head_.end(), -1);
    for (int k = 0; k < static_cast<int>(basic_.size()); ++k) {
      int s0 = 2 * k, s1 = 2 * k + 1;
      adj_arc_[s0] = k;
      adj_other_[s0] = basic_[k].head;
      adj_next_[s0] = adj_head_[basic_[k].tail];
      adj_head_[basic_[k].tail] = s0;
      adj_arc_[s1] = k;
      adj_other_[s1] = basic_[k].tail;
      adj_next_[s1] = adj_head_[basic_[k].head];
      adj_head_[basic_[k].head] = s1;
    }
    order_.clear();
    seen_.assign(V_, 0);
    order_.push_back(root_);
    seen_[root_] = 1;
    parent_[root_] = -1;
    up_idx_[root_] = -1;
    depth_[root_] = 0;
    pot_k_[root_] = 0;
    pot_[root_] = 0.0;
    for (std::size_t qi = 0; qi < order_.size(); ++qi) {
      int u = order_[qi];
      for (int s = adj_head_[u]; s >= 0; s = adj_next_[s]) {
        int v = adj_other_[s];
        if (seen_[v]) continue;
        int k = adj_arc_[s];
        seen_[v] = 1;
        parent_[v] = u;
        up_idx_[v] = k;
        up_forward_[v] = (basic_[k].tail == v);
        depth_[v] = depth_[u] + 1;
        int ck = basic_[k].artificial ? 1 : 0;
        double cf = basic_[k].cost;
        if (up_forward_[v]) {
          pot_k_[v] = ck + pot_k_[u];
          pot_[v] = cf + pot_[u];
        } else {
          pot_k_[v] = pot_k_[u] - ck;
          pot_[v] = pot_[u] - cf;
        }
        order_.push_back(v);
      }
    }
    if (static_cast<int>(order_.size()) != V_)
      throw solver_error("transport: basis lost connectivity");
  }

  // most negative reduced cost in a block, lexicographic on (M part, float)
  int price() {
    std::size_t total = static_cast<std::size_t>(m_) * n_;
    std::size_t block = std::max<std::size_t>(64, static_cast<std::size_t>(std::sqrt(static_cast<double>(total))));
    int best = -1;
    int best_k = 0;
    double best_f = 0.0;
    std::size_t counted = 0;
    std::size_t idx = static_cast<std::size_t>(scan_);
    for (std::size_t t = 0; t < total; ++t, ++idx) {
      if (idx == total) idx = 0;
      if (in_basis_[idx]) continue;
      int i = static_cast<int>(idx) / n_;
      int j = static_cast<int>(idx) % n_;
      int rk = pot_k_[m_ + j] - pot_k_[i];
      if (rk <= 0) {
        double rf = c_[idx] - pot_[i] + pot_[m_ + j];
        bool neg = rk < 0 || rf < -enter_tol_;
        if (neg && (best < 0 || rk < best_k || (rk == best_k && rf < best_f))) {
          best = static_cast<int>(idx);
          best_k = rk;
          best_f = rf;
        }
      }
      if (++counted == block) {
        if (best >= 0) break;
        counted = 0;
      }
    }
    if (best >= 0) scan_ = static_cast<int>((best + 1) % total);
    return best;
  }

  static int lca(const std::vector<int>& parent, const std::vector<int>& depth, int u, int v) {
    while (depth[u] > depth[v]) u = parent[u];
    while (depth[v] > depth[u]) v = parent[v];
    while (u != v) {
      u = parent[u];
      v = parent[v];
    }
    return u;
  }

  void pivot(int enter_idx) {
    int p = enter_idx / n_;
    int q = m_ + enter_idx % n_;
    int join = lca(parent_, depth_, p, q);

    double delta = std::numeric_limits<double>::infinity();
    int out_k = -1;
    for (int u = p; u != join; u = parent_[u]) {
      if (up_forward_[u] && basic_[up_idx_[u]].flow < delta) {
        delta = basic_[up_idx_[u]].flow;
        out_k = up_idx_[u];
      }
    }
    for (int u = q; u != join; u = parent_[u]) {
      if (!up_forward_[u] && basic_[up_idx_[u]].flow <= delta) {
        delta = basic_[up_idx_[u]].flow;
        out_k = up_idx_[u];
      }
    }
    if (out_k < 0) throw solver_error("transport: pivot cycle has no blocking arc");

    for (int u = p; u != join; u = parent_[u])
      basic_[up_idx_[u]].flow += up_forward_[u] ? -delta : delta;
    for (int u = q; u != join; u = parent_[u])
      basic_[up_idx_[u]].flow += up_forward_[u] ? delta : -delta;

    const BArc& leaving = basic_[out_k];
    if (!leaving.artificial)
      in_basis_[static_cast<std::size_t>(leaving.tail) * n_ + (leaving.head - m_)] = 0;
    basic_[out_k] = {p, q, delta, false, c_[enter_idx]};
    in_basis_[enter_idx] = 1;
  }

  Result extract_certified() {
    double total = std::accumulate(a_.begin(), a_.end(), 0.0);
    double mass_tol = 1e-9 * std::max(total, 1e-300);

    Result r;
    KahanSum cost;
    std::vector<KahanSum> row(m_), col(n_);
    for (const BArc& e : basic_) {
      if (e.artificial) {
        if (std::fabs(e.flow) > mass_tol)
          throw solver_error("transport: artificial arc kept positive flow");
        continue;
      }
      if (e.flow < -mass_tol) throw solver_error("transport: negative flow");
      if (e.flow <= 0.0) continue;
      int i = e.tail, j = e.head - m_;
      r.entries.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), e.flow});
      cost.add(e.flow * e.cost);
      row[i].add(e.flow);
      col[j].add(e.flow);
      int rk = pot_k_[e.head] - pot_k_[e.tail];
      double rf = e.cost - pot_[e.tail] + pot_[e.head];
      if (rk != 0 || std::fabs(rf) > cert_tol_)
        throw solver_error("transport: complementary slackness violated");
    }
    for (int i = 0; i < m_; ++i)
      if (std::fabs(row[i].value() - a_[i]) > mass_tol)
        throw solver_error("transport: source marginal mismatch");
    for (int j = 0; j < n_; ++j)
      if (std::fabs(col[j].value() - b_[j]) > mass_tol)
        throw solver_error("transport: sink marginal mismatch");

    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < n_; ++j) {
        int rk = pot_k_[m_ + j] - pot_k_[i];
        if (rk > 0) continue;
        if (rk < 0) throw solver_error("transport: dual infeasibility across components");
        if (c_[static_cast<std::size_t>(i) * n_ + j] - pot_[i] + pot_[m_ + j] < -cert_tol_)
          throw solver_error("transport: dual infeasibility");
      }
    }
    std::sort(r.entries.begin(), r.entries.end(),
              [](const TransportPlan::Entry& x, const TransportPlan::Entry& y) {
                return x.from != y.from ? x.from < y.from : x.to < y.to;
              });
    r.cost = cost.value();
    return r;
  }
};

struct Site {
  Vec2 pos;
  double weight;
};

std::vector<Site> positive_sites(const SignedAtomCloud& nu, const char* who) {
  std::vector<Site> s;
  s.reserve(nu.size());
  for (const Atom& a : nu.atoms) {
    if (!(a.weight > 0.0))
      throw std::invalid_argument(std::string(who) + ": weights must be positive");
    s.push_back({a.pos, a.weight});
  }
  return s;
}

TransportSimplex::Result solve_sites(const std::vector<Site>& mu, const std::vector<Site>& nu,
                                     const std::function<double(Vec2, Vec2)>& unit_cost,
                                     const char* who) {
  double ma = 0.0, mb = 0.0;
  {
    KahanSum sa, sb;
    for (const Site& s : mu) sa.add(s.weight);
    for (const Site& s : nu) sb.add(s.weight);
    ma = sa.value();
    mb = sb.value();
  }
  if (std::fabs(ma - mb) > 1e-9 * std::max(ma, mb))
    throw incompatibility_error(std::string(who) + ": total masses differ");

  std::size_t m = mu.size(), n = nu.size();
  std::vector<double> supply(m), demand(n);
  for (std::size_t i = 0; i < m; ++i) supply[i] = mu[i].weight;
  double rescale = ma / mb;
  for (std::size_t j = 0; j < n; ++j) demand[j] = nu[j].weight * rescale;
  std::vector<double> cost(m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) cost[i * n + j] = unit_cost(mu[i].pos, nu[j].pos);

  TransportSimplex simplex(std::move(supply), std::move(demand), cost);
  return simplex.solve();
}

bool identical_clouds(const SignedAtomCloud& a, const SignedAtomCloud& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!(a.atoms[i].pos == b.atoms[i].pos) || a.atoms[i].weight != b.atoms[i].weight)
      return false;
  return true;
}

SignedAtomCloud concat(const SignedAtomCloud& a, const SignedAtomCloud& b) {
  SignedAtomCloud out = a;
  out.atoms.insert(out.atoms.end(), b.atoms.begin(), b.atoms.end());
  return out;
}

}  // namespace

WassersteinResult w_p_positive(const SignedAtomCloud& mu, const SignedAtomCloud& nu, int p) {
  if (p != 1 && p != 2) throw std::invalid_argument("w_p_positive: p must be 1 or 2");
  if (mu.empty() || nu.empty()) throw std::domain_error("w_p_positive: empty cloud");
  auto ms = positive_sites(mu, "w_p_positive");
  auto ns = positive_sites(nu, "w_p_positive");

  if (identical_clouds(mu, nu)) {
    WassersteinResult res;
    res.plan.entries.reserve(ms.size());
    for (std::size_t i = 0; i < ms.size(); ++i) res.plan.entries.push_back({i, i, ms[i].weight});
    return res;
  }

  auto unit = (p == 1) ? std::function<double(Vec2, Vec2)>([](Vec2 x, Vec2 y) { return (x - y).norm(); })
                       : std::function<double(Vec2, Vec2)>([](Vec2 x, Vec2 y) { return (x - y).norm2(); });
  auto sol = solve_sites(ms, ns, unit, "w_p_positive");
  WassersteinResult res;
  res.plan.entries = std::move(sol.entries);
  res.plan.cost = sol.cost;
  res.distance = (p == 1) ? sol.cost : std::sqrt(sol.cost);
  return res;
}

double w1_signed(const SignedAtomCloud& mu, const SignedAtomCloud& nu) {
  if (!compatible(mu, nu)) throw incompatibility_error("w1_signed: sign-class masses differ");
  if (identical_clouds(mu, nu)) return 0.0;
  auto [mp, mn] = jordan(mu);
  auto [np, nn] = jordan(nu);
  SignedAtomCloud lhs = concat(mp, nn);
  SignedAtomCloud rhs = concat(mn, np);
  if (lhs.empty() && rhs.empty()) return 0.0;
  if (lhs.empty() || rhs.empty()) {
    double rest = total_variation(lhs) + total_variation(rhs);
    double scale = std::max(total_variation(mu), total_variation(nu));
    if (rest <= 1e-9 * std::max(scale, 1e-300)) return 0.0;
    throw incompatibility_error("w1_signed: combined sides unbalanced");
  }
  return w_p_positive(lhs, rhs, 1).distance;
}

double w2_signed(const SignedAtomCloud& mu, const SignedAtomCloud& nu) {
  if (!compatible(mu, nu)) throw incompatibility_error("w2_signed: sign-class masses differ");
  auto [mp, mn] = jordan(mu);
  auto [np, nn] = jordan(nu);
  double dp = 0.0, dn = 0.0;
  if (!mp.empty() || !np.empty()) {
    if (mp.empty() || np.empty()) throw incompatibility_error("w2_signed: positive parts unbalanced");
    dp = identical_clouds(mp, np) ? 0.0 : w_p_positive(mp, np, 2).distance;
  }
  if (!mn.empty() || !nn.empty()) {
    if (mn.empty() || nn.empty()) throw incompatibility_error("w2_signed: negative parts unbalanced");
    dn = identical_clouds(mn, nn) ? 0.0 : w_p_positive(mn, nn, 2).distance;
  }
  return std::sqrt(dp * dp + dn * dn);
}

double w1_phase(const PhaseAtomCloud& f, const PhaseAtomCloud& g) {
  double mf = mass(f), mg = mass(g);
  if (std::fabs(mf - mg) > 1e-9 * std::max({mf, mg, 1e-300}))
    throw incompatibility_error("w1_phase: total masses differ");
  if (f.empty() && g.empty()) return 0.0;

  bool same = f.size() == g.size();
  for (std::size_t i = 0; same && i < f.size(); ++i)
    same = f.atoms[i].pos == g.atoms[i].pos && f.atoms[i].vel == g.atoms[i].vel &&
           f.atoms[i].weight == g.atoms[i].weight;
  if (same) return 0.0;

  std::vector<Site> fs(f.size()), gs(g.size());
  std::vector<Vec2> fv(f.size()), gv(g.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    fs[i] = {f.atoms[i].pos, f.atoms[i].weight};
    fv[i] = f.atoms[i].vel;
  }
  for (std::size_t j = 0; j < g.size(); ++j) {
    gs[j] = {g.atoms[j].pos, g.atoms[j].weight};
    gv[j] = g.atoms[j].vel;
  }
  std::size_t nG = gs.size();
  std::vector<double> cost(fs.size() * nG);
  for (std::size_t i = 0; i < fs.size(); ++i)
    for (std::size_t j = 0; j < nG; ++j)
      cost[i * nG + j] =
          std::sqrt((fs[i].pos - gs[j].pos).norm2() + (fv[i] - gv[j]).norm2());

  std::vector<double> supply(fs.size()), demand(gs.size());
  for (std::size_t i = 0; i < fs.size(); ++i) supply[i] = fs[i].weight;
  double rescale = mf / mg;
  for (std::size_t j = 0; j < gs.size(); ++j) demand[j] = gs[j].weight * rescale;
  TransportSimplex simplex(std::move(supply), std::move(demand), cost);
  return simplex.solve().cost;
}

double w1_pair(const SignedAtomCloud& omega1, const PhaseAtomCloud& f1,
               const SignedAtomCloud& omega2, const PhaseAtomCloud& f2) {
  return w1_signed(omega1, omega2) + w1_phase(f1, f2);
}

double brute_force_w1(const SignedAtomCloud& mu, const SignedAtomCloud& nu) {
  auto [mp, mn] = jordan(mu);
  auto [np, nn] = jordan(nu);
  SignedAtomCloud lhs = concat(mp, nn);
  SignedAtomCloud rhs = concat(mn, np);
  if (lhs.empty() && rhs.empty()) return 0.0;
  if (lhs.size() != rhs.size())
    throw oracle_error("brute_force_w1: combined sides have different atom counts");
  if (lhs.size() > 8) throw oracle_error("brute_force_w1: more than 8 atoms per side");
  double w = lhs.atoms[0].weight;
  for (const SignedAtomCloud* side : {&lhs, &rhs})
    for (const Atom& a : side->atoms)
      if (std::fabs(a.weight - w) > 1e-12 * std::fabs(w))
        throw oracle_error("brute_force_w1: weights are not uniform");

  std::vector<std::size_t> perm(rhs.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (std::size_t i = 0; i < perm.size(); ++i)
      total += (lhs.atoms[i].pos - rhs.atoms[perm[i]].pos).norm();
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return w * best;
}

Witness cone(Vec2 anchor) {
  return [anchor](Vec2 x) { return (x - anchor).norm(); };
}

Witness cone_max(std::vector<Vec2> anchors) {
  if (anchors.empty()) throw std::invalid_argument("cone_max: no anchors");
  return [anchors = std::move(anchors)](Vec2 x) {
    double best = 0.0;
    bool first = true;
    for (Vec2 a : anchors) {
      double v = (x - a).norm();
      if (first || v > best) best = v;
      first = false;
    }
    return best;
  };
}

double dual_lower_bound(const SignedAtomCloud& mu, const SignedAtomCloud& nu, const Witness& phi) {
  KahanSum acc;
  for (const Atom& a : mu.atoms) acc.add(a.weight * phi(a.pos));
  for (const Atom& a : nu.atoms) acc.add(-a.weight * phi(a.pos));
  return acc.value();
}

}  // namespace spray
