#include "spray/diagnostics.hpp"

#include <cmath>
#include <ostream>

#include "spray/errors.hpp"
#include "spray/kernels.hpp"
#include "spray/snapshot.hpp"
#include "spray/summation.hpp"

namespace spray {

namespace {

std::vector<Atom> combined_atoms(const SprayState& s) {
  std::vector<Atom> atoms;
  atoms.reserve(s.vortices.atoms.size() + s.spray.atoms.size());
  for (const Atom& a : s.vortices.atoms) atoms.push_back(a);
  for (const PhaseAtom& a : s.spray.atoms) atoms.push_back(Atom{a.pos, a.weight});
  return atoms;
}

double interaction_sum(const std::vector<Atom>& atoms, const BlobKernel& kernel) {
  KahanSum sum;
  for (std::size_t p = 1; p < atoms.size(); ++p)
    for (std::size_t q = 0; q < p; ++q)
      sum.add(atoms[p].weight * atoms[q].weight * kernel.stream(atoms[p].pos - atoms[q].pos));
  // each unordered pair appears twice in the double sum
  return 2.0 * sum.value();
}

}  // namespace

double modulated_energy(const SprayState& s, const CouplingParams& c,
                        const std::function<Vec2(Vec2)>& v,
                        const SignedAtomCloud& curl_discrete) {
  KahanSum kinetic;
  for (const PhaseAtom& a : s.spray.atoms) {
    const Vec2 dev = a.vel - v(a.pos);
    kinetic.add(c.epsilon * a.weight * dev.norm2());
  }

  std::vector<Atom> atoms = combined_atoms(s);
  for (const Atom& d : curl_discrete.atoms) {
    bool cancelled = false;
    for (Atom& a : atoms) {
      if (a.weight != 0.0 && a.pos == d.pos) {
        a.weight -= d.weight;
        cancelled = true;
        break;
      }
    }
    if (!cancelled) atoms.push_back(Atom{d.pos, -d.weight});
  }
  std::vector<Atom> live;
  live.reserve(atoms.size());
  for (const Atom& a : atoms)
    if (a.weight != 0.0) live.push_back(a);

  const BlobKernel kernel(c.delta);
  return kinetic.value() - interaction_sum(live, kernel);
}

double hamiltonian(const SprayState& s, const CouplingParams& c) {
  static const std::function<Vec2(Vec2)> zero_field = [](Vec2) { return Vec2{0.0, 0.0}; };
  return 0.5 * modulated_energy(s, c, zero_field, SignedAtomCloud{});
}

DiagnosticsRow observables(const SprayState& s, const CouplingParams& c,
                           const std::function<Vec2(Vec2)>* ref_velocity) {
  DiagnosticsRow row;
  row.time = s.time;
  row.hamiltonian = hamiltonian(s, c);
  row.circ_pos = mass_positive(s.vortices);
  row.circ_neg = mass_negative(s.vortices);
  row.spray_mass = mass(s.spray);
  row.m2 = second_moment(s.spray);

  KahanSum dev2, abs1;
  for (const PhaseAtom& a : s.spray.atoms) {
    const Vec2 d = ref_velocity ? a.vel - (*ref_velocity)(a.pos) : a.vel;
    dev2.add(a.weight * d.norm2());
    abs1.add(a.weight * a.vel.norm());
  }
  row.eps_kinetic = c.epsilon * dev2.value();
  row.sqrt_eps_j_l1 = std::sqrt(c.epsilon) * abs1.value();
  return row;
}

std::vector<DiagnosticsRow> trajectory_diagnostics(const Trajectory& traj,
                                                   const CouplingParams& c,
                                                   const std::function<Vec2(Vec2)>* ref_velocity) {
  std::vector<DiagnosticsRow> rows;
  rows.reserve(traj.states.size());
  for (const SprayState& s : traj.states) rows.push_back(observables(s, c, ref_velocity));
  return rows;
}

void write_diagnostics_csv(std::ostream& out, const std::vector<DiagnosticsRow>& rows) {
  out << "time,hamiltonian,circ_pos,circ_neg,spray_mass,m2,eps_kinetic,sqrt_eps_j_l1\n";
  for (const DiagnosticsRow& r : rows) {
    out << format_double(r.time) << ',' << format_double(r.hamiltonian) << ','
        << format_double(r.circ_pos) << ',' << format_double(r.circ_neg) << ','
        << format_double(r.spray_mass) << ',' << format_double(r.m2) << ','
        << format_double(r.eps_kinetic) << ',' << format_double(r.sqrt_eps_j_l1) << '\n';
  }
}

std::vector<LoeperRow> loeper_divergence(const Trajectory& a, const Trajectory& b) {
  if (a.states.size() != b.states.size())
    throw pairing_error("trajectories observe different numbers of states");
  std::vector<LoeperRow> rows;
  rows.reserve(a.states.size());
  for (std::size_t k = 0; k < a.states.size(); ++k) {
    const SprayState& sa = a.states[k];
    const SprayState& sb = b.states[k];
    if (std::fabs(sa.time - sb.time) > 1e-12 * (1.0 + std::fabs(sa.time)))
      throw pairing_error("trajectories observe different times");
    if (sa.vortices.atoms.size() != sb.vortices.atoms.size() ||
        sa.spray.atoms.size() != sb.spray.atoms.size())
      throw pairing_error("trajectories carry different atom counts");

    LoeperRow row;
    row.time = sa.time;
    KahanSum sq, vq;
    for (std::size_t i = 0; i < sa.spray.atoms.size(); ++i) {
      const PhaseAtom& pa = sa.spray.atoms[i];
      const PhaseAtom& pb = sb.spray.atoms[i];
      if (pa.weight != pb.weight) throw pairing_error("spray atom weights differ");
      sq.add(pa.weight * ((pa.pos - pb.pos).norm2() + (pa.vel - pb.vel).norm2()));
    }
    for (std::size_t j = 0; j < sa.vortices.atoms.size(); ++j) {
      const Atom& va = sa.vortices.atoms[j];
      const Atom& vb = sb.vortices.atoms[j];
      if (va.weight != vb.weight) throw pairing_error("vortex atom weights differ");
      vq.add(std::fabs(va.weight) * (va.pos - vb.pos).norm2());
    }
    row.spray_q = sq.value();
    row.vortex_q = vq.value();
    rows.push_back(row);
  }
  return rows;
}

}  // namespace spray
