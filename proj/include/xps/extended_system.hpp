#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "xps/csv.hpp"
#include "xps/errors.hpp"
#include "xps/nilpotent.hpp"
#include "xps/ode.hpp"
#include "xps/potentials.hpp"

namespace xps {

/// The extended system H_ext = H_q - H_p built from two SUSY potentials.
///
/// The p-sector potential may be absent, in which case that sector is a
/// free particle (V identically zero). Central charges shift the sector
/// energies only; the default is zero.
struct ExtendedSystem {
    SuperPotential w;
    std::optional<SuperPotential> v;
    double c_q = 0.0;
    double c_p = 0.0;

    bool has_v() const { return v.has_value(); }

    double v_value(double p) const { return v ? v->value(p) : 0.0; }
    double v_prime(double p) const { return v ? v->derivative(p) : 0.0; }
    double v_second(double p) const { return v ? v->second_derivative(p) : 0.0; }
};

/// Point of the extended phase space with nilpotent coordinates and the
/// accumulated fermion phases Phi = integral of the coupling along the flow.
struct PhaseState {
    NilpotentScalar q, p, pi_q, pi_p;
    double phi_q = 0.0;
    double phi_p = 0.0;
    double t = 0.0;
};

namespace detail {

inline double clamped(const SuperPotential& w, double x) {
    if (x < w.domain().lo) return w.domain().lo;
    if (x > w.domain().hi) return w.domain().hi;
    return x;
}

}  // namespace detail

/// Sector energy 1/2 pi^2 + 1/2 W^2 + W' N + C in nilpotent arithmetic.
inline NilpotentScalar sector_hamiltonian(const SuperPotential& w, double c,
                                          NilpotentScalar x,
                                          NilpotentScalar pi) {
    const double wv = w.value(x.body);
    const double wp = w.derivative(x.body);
    NilpotentScalar wn = lift(x, wv, wp);
    NilpotentScalar h = 0.5 * (pi * pi) + 0.5 * (wn * wn);
    h.soul += wp;  // the W'(q) N coupling; soul*N*N terms vanish
    h.body += c;
    return h;
}

/// H_ext = H_q - H_p evaluated at a phase-space point.
inline NilpotentScalar extended_hamiltonian(const ExtendedSystem& sys,
                                            const PhaseState& s) {
    NilpotentScalar hq = sector_hamiltonian(sys.w, sys.c_q, s.q, s.pi_q);
    NilpotentScalar hp;
    if (sys.has_v()) {
        hp = sector_hamiltonian(*sys.v, sys.c_p, s.p, s.pi_p);
    } else {
        hp = 0.5 * (s.pi_p * s.pi_p);
        hp.body += sys.c_p;
    }
    return hq - hp;
}

struct Trajectory {
    enum class Status { ok, domain_exit };
    std::vector<PhaseState> samples;
    Status status = Status::ok;
    std::string note;
};

/// Integrate the classical flow of the extended system.
///
/// Each sector evolves canonically under its own Hamiltonian (the relative
/// sign in H_ext cancels between the bracket and the generator, as the
/// equations of motion show):
///   qdot = pi_q,  pidot_q = -d/dq [ W^2/2 + W' N ],
///   pdot = pi_p,  pidot_p = -d/dp [ V^2/2 + V' N ],
///   phidot_q = W'(q),  phidot_p = V'(p).
/// The nilpotent sector propagates exactly through lifted arithmetic, so
/// the soul components obey the exact linearization of the body flow plus
/// the grading-coupling drive.
///
/// Sample states are produced at n_samples+1 uniformly spaced times; the
/// integrator steps exactly onto each sample time. Leaving a potential's
/// domain stops the run and reports the last in-domain sample.
inline Trajectory integrate_classical(const ExtendedSystem& sys,
                                      const PhaseState& s0, double t_end,
                                      double tol = 1e-10,
                                      int n_samples = 500) {
    if (!(tol > 0)) throw ParameterError("integrate_classical: tol must be > 0");
    if (!sys.w.in_domain(s0.q.body))
        throw DomainError("integrate_classical: initial q outside domain");
    if (sys.has_v() && !sys.v->in_domain(s0.p.body))
        throw DomainError("integrate_classical: initial p outside domain");

    using S = std::array<double, 10>;
    auto rhs = [&sys](double, const S& y, S& dy) {
        const double qb = detail::clamped(sys.w, y[0]);
        const double qs = y[1];
        const double wv = sys.w.value(qb);
        const double wp = sys.w.derivative(qb);
        const double wpp = sys.w.second_derivative(qb);
        dy[0] = y[4];
        dy[1] = y[5];
        dy[4] = -wv * wp;
        dy[5] = -(wp * wp + wv * wpp) * qs - wpp;
        dy[8] = wp;

        double pb = y[2];
        if (sys.has_v()) pb = detail::clamped(*sys.v, pb);
        const double ps = y[3];
        const double vv = sys.v_value(pb);
        const double vp = sys.v_prime(pb);
        const double vpp = sys.v_second(pb);
        dy[2] = y[6];
        dy[3] = y[7];
        dy[6] = -vv * vp;
        dy[7] = -(vp * vp + vv * vpp) * ps - vpp;
        dy[9] = vp;
    };

    OdeOptions opts;
    opts.rel_tol = tol;
    opts.abs_tol = tol;
    DormandPrince<10> solver(rhs, opts);

    S y = {s0.q.body,    s0.q.soul,    s0.p.body,    s0.p.soul,
           s0.pi_q.body, s0.pi_q.soul, s0.pi_p.body, s0.pi_p.soul,
           s0.phi_q,     s0.phi_p};

    auto to_state = [](const S& v, double t) {
        PhaseState s;
        s.q = {v[0], v[1]};
        s.p = {v[2], v[3]};
        s.pi_q = {v[4], v[5]};
        s.pi_p = {v[6], v[7]};
        s.phi_q = v[8];
        s.phi_p = v[9];
        s.t = t;
        return s;
    };

    Trajectory traj;
    traj.samples.push_back(to_state(y, s0.t));
    const double dt = (t_end - s0.t) / n_samples;
    for (int i = 1; i <= n_samples; ++i) {
        const double t_target = s0.t + dt * i;
        solver.integrate_to(traj.samples.back().t, t_target, y);
        const bool inside =
            sys.w.in_domain(y[0]) && (!sys.has_v() || sys.v->in_domain(y[2]));
        if (!inside) {
            traj.status = Trajectory::Status::domain_exit;
            traj.note = "trajectory left the potential domain near t=" +
                        std::to_string(t_target) +
                        "; last in-domain sample retained";
            break;
        }
        traj.samples.push_back(to_state(y, t_target));
    }
    return traj;
}

/// Conserved combination I(t) = (pi + i W) e^{-i Phi} along a trajectory.
///
/// Along the body flow d/dt (pi + iW) = iW' (pi + iW), so dressing with the
/// accumulated phase makes I constant; its drift measures how well the
/// integrated flow realizes the algebra of odd integrals of motion.
inline std::vector<std::complex<double>> charge_phase_witness(
    const ExtendedSystem& sys, const Trajectory& traj, Sector sector) {
    if (sys.c_q != 0.0 || sys.c_p != 0.0)
        throw PreconditionError(
            "charge_phase_witness: requires vanishing central charges");
    if (sector == Sector::p && !sys.has_v())
        throw PreconditionError(
            "charge_phase_witness: p-sector requires a V potential");
    std::vector<std::complex<double>> out;
    out.reserve(traj.samples.size());
    for (const auto& s : traj.samples) {
        double pot, phase, pi;
        if (sector == Sector::q) {
            pot = sys.w.value(s.q.body);
            phase = s.phi_q;
            pi = s.pi_q.body;
        } else {
            pot = sys.v->value(s.p.body);
            phase = s.phi_p;
            pi = s.pi_p.body;
        }
        out.push_back(std::complex<double>(pi, pot) *
                      std::exp(std::complex<double>(0.0, -phase)));
    }
    return out;
}

inline const std::vector<std::string>& trajectory_csv_columns() {
    static const std::vector<std::string> cols = {
        "t",         "q_body",    "q_soul",    "p_body",     "p_soul",
        "pi_q_body", "pi_q_soul", "pi_p_body", "pi_p_soul",  "phi_q",
        "phi_p",     "H_body",    "H_soul"};
    return cols;
}

inline CsvWriter trajectory_csv(const ExtendedSystem& sys,
                                const Trajectory& traj) {
    CsvWriter csv(trajectory_csv_columns());
    for (const auto& s : traj.samples) {
        const NilpotentScalar h = extended_hamiltonian(sys, s);
        csv.add_row({s.t, s.q.body, s.q.soul, s.p.body, s.p.soul, s.pi_q.body,
                     s.pi_q.soul, s.pi_p.body, s.pi_p.soul, s.phi_q, s.phi_p,
                     h.body, h.soul});
    }
    return csv;
}

}  // namespace xps
