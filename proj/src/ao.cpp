#include "oamsec/ao.hpp"

#include <cmath>

#include "oamsec/error.hpp"
#include "oamsec/rng.hpp"

namespace oamsec {

namespace {

const double kLn2 = std::log(2.0);

// H_R2 t_k for every stream k of the model's transmit basis (columns).
cmat incident_streams(const SystemModel& m, const cvec& theta1) {
    return ris2_incident(m.channels, theta1) * m.basis.transmit;
}

}  // namespace

RateReport evaluate(const SystemModel& model, const DesignPoint& d) {
    return rate_report(model.channels, d.ris, model.transmit_state(d.p), model.codebook, model.pair_index,
                       model.basis, model.noise);
}

double ris2_power(const SystemModel& model, const DesignPoint& d) {
    return ris2_radiated_power(model.channels, d.ris, model.transmit_state(d.p), model.pair(), model.basis.transmit,
                               model.noise.sigma_r2);
}

std::pair<rvec, rvec> update_t(const PowerProblem& prob, const rvec& p) {
    const int n = prob.size();
    rvec tb(n), te(n);
    for (int l = 0; l < n; ++l) {
        const double int_b = prob.gains_bob.row(l).dot(p) - p(l) * prob.gains_bob(l, l) + prob.c1(l);
        tb(l) = 1.0 / (1.0 + int_b / prob.sigma_b2);
        const double all_e = prob.gains_eve.row(l).dot(p) + prob.c2(l);
        te(l) = 1.0 / (1.0 + all_e / prob.sigma_e2);
    }
    return {tb, te};
}

PowerProblem build_power_problem(const SystemModel& model, const DesignPoint& d) {
    const SnPair& pair = model.pair();
    const BobEffective eb = effective_channel_bob(model.channels, d.ris, pair, model.basis);
    const EveEffective ee = effective_channel_eve(model.channels, d.ris, pair, model.basis.transmit);
    const TransmitState st = model.transmit_state(d.p);
    const rvec a2 = d.ris.a.array().square();

    PowerProblem prob;
    prob.gains_bob = eb.h.cwiseAbs2();
    prob.gains_eve = ee.h_signal.cwiseAbs2();
    prob.c1 = model.noise.sigma_r2 * (eb.noise_rows.cwiseAbs2() * a2);
    prob.c2 = ee.h_an.cols() > 0 ? rvec(st.sigma_zz_sq * ee.h_an.cwiseAbs2().rowwise().sum())
                                 : rvec(rvec::Zero(model.n_s()));
    prob.sigma_b2 = model.noise.sigma_b2;
    prob.sigma_e2 = model.noise.sigma_e2;
    prob.budget = model.budget();
    prob.p_th = model.p_th;

    const cmat amp = d.ris.a.cast<cplx>().asDiagonal() * incident_streams(model, d.ris.theta1);
    prob.ris2_coeff.resize(model.n_s());
    for (int l = 0; l < model.n_s(); ++l) prob.ris2_coeff(l) = amp.col(pair.signal[l]).squaredNorm();
    prob.ris2_offset = model.noise.sigma_r2 * a2.sum();
    for (int z : pair.an) prob.ris2_offset += st.sigma_zz_sq * amp.col(z).squaredNorm();
    prob.ris2_limit = model.p_r2;

    std::tie(prob.t_b, prob.t_e) = update_t(prob, d.p);
    return prob;
}

std::pair<cvec, rvec> update_tau_omega(const BobEffective& eff, const rvec& p, const rvec& a, double sigma_r2,
                                       double sigma_b2) {
    const Eigen::Index n = eff.h.rows();
    const rvec a2 = a.array().square();
    cvec tau(n);
    rvec omega(n);
    for (Eigen::Index l = 0; l < n; ++l) {
        const double amp_noise = sigma_r2 * eff.noise_rows.row(l).cwiseAbs2().dot(a2.transpose());
        const double total = eff.h.row(l).cwiseAbs2().dot(p.transpose()) + amp_noise + sigma_b2;
        const double interf = total - p(l) * std::norm(eff.h(l, l));
        tau(l) = std::sqrt(p(l)) * eff.h(l, l) / total;
        omega(l) = 1.0 + p(l) * std::norm(eff.h(l, l)) / interf;
    }
    return {tau, omega};
}

rvec mse(const BobEffective& eff, const rvec& p, const rvec& a, const cvec& tau, double sigma_r2, double sigma_b2) {
    const Eigen::Index n = eff.h.rows();
    const rvec a2 = a.array().square();
    rvec e(n);
    for (Eigen::Index l = 0; l < n; ++l) {
        double rest = sigma_b2 + sigma_r2 * eff.noise_rows.row(l).cwiseAbs2().dot(a2.transpose());
        for (Eigen::Index k = 0; k < n; ++k)
            if (k != l) rest += p(k) * std::norm(eff.h(l, k));
        e(l) = std::norm(1.0 - std::conj(tau(l)) * std::sqrt(p(l)) * eff.h(l, l)) + std::norm(tau(l)) * rest;
    }
    return e;
}

AmplifierProblem build_amplifier_problem(const SystemModel& model, const DesignPoint& d, const cvec& tau,
                                         const rvec& omega) {
    const SnPair& pair = model.pair();
    const int ns = model.n_s();
    const int q2 = model.channels.q2();
    const BobEffective eb = effective_channel_bob(model.channels, d.ris, pair, model.basis);
    const cmat z = incident_streams(model, d.ris.theta1);  // Q2 x N
    const TransmitState st = model.transmit_state(d.p);

    AmplifierProblem prob;
    prob.omega = cmat::Zero(q2, q2);
    prob.g = cvec::Zero(q2);
    for (int l = 0; l < ns; ++l) {
        const cvec kappa = eb.noise_rows.row(l).transpose();
        const double w = omega(l) * std::norm(tau(l));
        for (int k = 0; k < ns; ++k) {
            const cvec chi = kappa.cwiseProduct(z.col(pair.signal[k]));
            if (w != 0.0) prob.omega.noalias() += (w * d.p(k)) * chi * chi.adjoint();
            if (k == l) prob.g += omega(l) * std::conj(tau(l)) * std::sqrt(d.p(l)) * chi;
        }
        prob.omega.diagonal() += (w * model.noise.sigma_r2) * kappa.cwiseAbs2().cast<cplx>();
    }
    rvec diag = rvec::Constant(q2, model.noise.sigma_r2);
    for (int l = 0; l < ns; ++l) diag += d.p(l) * z.col(pair.signal[l]).cwiseAbs2();
    for (int zi : pair.an) diag += st.sigma_zz_sq * z.col(zi).cwiseAbs2();
    prob.power_quadratic = diag.asDiagonal();
    prob.limit = model.p_r2;
    prob.a_max = model.a_max;
    return prob;
}

Theta1Objective::Theta1Objective(const SystemModel& model, const DesignPoint& d)
    : ns_(model.n_s()), p_(d.p), sigma_b2_(model.noise.sigma_b2), sigma_e2_(model.noise.sigma_e2) {
    const ChannelSet& ch = model.channels;
    const SnPair& pair = model.pair();
    const cmat& t = model.basis.transmit;
    const TransmitState st = model.transmit_state(d.p);
    const cmat u = ch.ar1 * t;  // Q1 x N
    const cmat tail = ch.r2b * d.ris.theta2.conjugate().asDiagonal();
    const cmat v = model.basis.receive * tail * d.ris.a.cast<cplx>().asDiagonal() * ch.r1r2;  // N x Q1

    std::vector<int> eve_streams = pair.signal;
    eve_streams.insert(eve_streams.end(), pair.an.begin(), pair.an.end());
    weights_eve_.resize(eve_streams.size());
    for (int k = 0; k < ns_; ++k) weights_eve_(k) = p_(k);
    for (std::size_t k = ns_; k < eve_streams.size(); ++k) weights_eve_(k) = st.sigma_zz_sq;

    const rvec a2 = d.ris.a.array().square();
    c1_.resize(ns_);
    mu_.assign(ns_, {});
    eta_.assign(ns_, {});
    zeta_.assign(ns_, {});
    for (int l = 0; l < ns_; ++l) {
        const int mode = pair.signal[l];
        const cvec vl = v.row(mode).transpose();
        c1_(l) = model.noise.sigma_r2 * (model.basis.receive.row(mode) * tail).cwiseAbs2().dot(a2.transpose());
        for (int k = 0; k < ns_; ++k) mu_[l].push_back(vl.cwiseProduct(u.col(pair.signal[k])));
        const cvec r1e = ch.r1e.row(mode).transpose();
        for (int s : eve_streams) {
            eta_[l].push_back(r1e.cwiseProduct(u.col(s)));
            zeta_[l].push_back(ch.ae.row(mode) * t.col(s));
        }
    }
}

double Theta1Objective::value(const cvec& theta) const {
    double total = 0.0;
    for (int l = 0; l < ns_; ++l) {
        double sb = c1_(l) + sigma_b2_, ib = sb;
        for (int k = 0; k < ns_; ++k) {
            const double v = p_(k) * std::norm(theta.dot(mu_[l][k]));
            sb += v;
            if (k != l) ib += v;
        }
        double se = sigma_e2_, ie = sigma_e2_;
        for (std::size_t k = 0; k < eta_[l].size(); ++k) {
            const double v = weights_eve_(k) * std::norm(zeta_[l][k] + theta.dot(eta_[l][k]));
            se += v;
            if (static_cast<int>(k) != l) ie += v;
        }
        total += -std::log(sb) + std::log(ib) + std::log(se) - std::log(ie);
    }
    return total / kLn2;
}

cvec Theta1Objective::egrad(const cvec& theta) const {
    cvec grad = cvec::Zero(theta.size());
    cvec gs(theta.size()), gi(theta.size());
    for (int l = 0; l < ns_; ++l) {
        gs.setZero();
        gi.setZero();
        double sb = c1_(l) + sigma_b2_, ib = sb;
        for (int k = 0; k < ns_; ++k) {
            const cplx h = theta.dot(mu_[l][k]);
            const double v = p_(k) * std::norm(h);
            const cvec term = (2.0 * p_(k) * std::conj(h)) * mu_[l][k];
            sb += v;
            gs += term;
            if (k != l) {
                ib += v;
                gi += term;
            }
        }
        grad += -gs / sb + gi / ib;

        gs.setZero();
        gi.setZero();
        double se = sigma_e2_, ie = sigma_e2_;
        for (std::size_t k = 0; k < eta_[l].size(); ++k) {
            const cplx h = zeta_[l][k] + theta.dot(eta_[l][k]);
            const double v = weights_eve_(k) * std::norm(h);
            const cvec term = (2.0 * weights_eve_(k) * std::conj(h)) * eta_[l][k];
            se += v;
            gs += term;
            if (static_cast<int>(k) != l) {
                ie += v;
                gi += term;
            }
        }
        grad += gs / se - gi / ie;
    }
    return grad / kLn2;
}

Theta2Objective::Theta2Objective(const SystemModel& model, const DesignPoint& d)
    : ns_(model.n_s()), p_(d.p), sigma_r2_(model.noise.sigma_r2), sigma_b2_(model.noise.sigma_b2) {
    const ChannelSet& ch = model.channels;
    const SnPair& pair = model.pair();
    const cmat z = d.ris.a.cast<cplx>().asDiagonal() * incident_streams(model, d.ris.theta1);  // Q2 x N
    const cmat w = model.basis.receive * ch.r2b;                                            // N x Q2
    const rvec a2 = d.ris.a.array().square();
    mu_.assign(ns_, {});
    for (int l = 0; l < ns_; ++l) {
        const cvec wl = w.row(pair.signal[l]).transpose();
        iota2_.push_back(wl.cwiseAbs2().cwiseProduct(a2));
        for (int k = 0; k < ns_; ++k) mu_[l].push_back(wl.cwiseProduct(z.col(pair.signal[k])));
    }
}

double Theta2Objective::value(const cvec& theta) const {
    const rvec mod2 = theta.cwiseAbs2();
    double total = 0.0;
    for (int l = 0; l < ns_; ++l) {
        const double base = sigma_b2_ + sigma_r2_ * iota2_[l].dot(mod2);
        double sb = base, ib = base;
        for (int k = 0; k < ns_; ++k) {
            const double v = p_(k) * std::norm(theta.dot(mu_[l][k]));
            sb += v;
            if (k != l) ib += v;
        }
        total += -std::log(sb) + std::log(ib);
    }
    return total / kLn2;
}

cvec Theta2Objective::egrad(const cvec& theta) const {
    const rvec mod2 = theta.cwiseAbs2();
    cvec grad = cvec::Zero(theta.size());
    for (int l = 0; l < ns_; ++l) {
        const double base = sigma_b2_ + sigma_r2_ * iota2_[l].dot(mod2);
        const cvec noise_grad = (2.0 * sigma_r2_) * iota2_[l].cast<cplx>().cwiseProduct(theta);
        cvec gs = noise_grad, gi = noise_grad;
        double sb = base, ib = base;
        for (int k = 0; k < ns_; ++k) {
            const cplx h = theta.dot(mu_[l][k]);
            const double v = p_(k) * std::norm(h);
            const cvec term = (2.0 * p_(k) * std::conj(h)) * mu_[l][k];
            sb += v;
            gs += term;
            if (k != l) {
                ib += v;
                gi += term;
            }
        }
        grad += -gs / sb + gi / ib;
    }
    return grad / kLn2;
}

cvec egrad_theta1(const SystemModel& model, const DesignPoint& d) {
    return Theta1Objective(model, d).egrad(d.ris.theta1);
}

cvec egrad_theta2(const SystemModel& model, const DesignPoint& d) {
    return Theta2Objective(model, d).egrad(d.ris.theta2);
}

DesignPoint initial_design(const SystemModel& model, std::uint64_t seed) {
    Rng rng(derive_seed(seed, 0x1A17));
    DesignPoint d;
    d.ris.theta1 = random_phases(rng, model.channels.q1());
    d.ris.theta2 = random_phases(rng, model.channels.q2());
    d.p = rvec::Constant(model.n_s(), model.budget() / model.n_s());
    d.ris.a = rvec::Ones(model.channels.q2());
    if (std::isfinite(model.p_r2)) {
        const double unit = ris2_power(model, d);
        d.ris.a.setConstant(std::min(model.a_max, std::sqrt(model.p_r2 / unit)));
    }
    return d;
}

AoResult alternating_optimize(const SystemModel& model, const AoConfig& config, const AoFlags& flags) {
    return alternating_optimize(model, initial_design(model, config.seed), config, flags);
}

AoResult alternating_optimize(const SystemModel& model, const DesignPoint& start, const AoConfig& config,
                              const AoFlags& flags) {
    AoResult res;
    DesignPoint d = start;
    RateReport rep = evaluate(model, d);
    res.trace.initial = rep;
    res.design = d;
    res.report = rep;
    double prev = rep.r_oam;

    for (int iter = 1; iter <= config.max_outer_iters; ++iter) {
        AoRecord rec;
        rec.iter = iter;

        if (flags.power) {
            for (int round = 0; round < config.power_rounds; ++round) {
                const PowerProblem prob = build_power_problem(model, d);
                rvec p_new;
                try {
                    p_new = solve_power(prob, d.p, config.convex_tolerance);
                } catch (const InfeasibleError& e) {
                    throw InfeasibleError(e.constraint(), std::string(e.what()) + " at outer iteration " +
                                                              std::to_string(iter));
                }
                if (!(power_objective(prob, p_new) > power_objective(prob, d.p))) break;
                d.p = p_new;
            }
        }

        if (flags.amplifier) {
            const BobEffective eb = effective_channel_bob(model.channels, d.ris, model.pair(), model.basis);
            const auto [tau, omega] = update_tau_omega(eb, d.p, d.ris.a, model.noise.sigma_r2, model.noise.sigma_b2);
            const AmplifierProblem amp = build_amplifier_problem(model, d, tau, omega);
            const rvec a_new = solve_amplifier(amp, config.convex_tolerance);
            if (amplifier_objective(amp, a_new) > amplifier_objective(amp, d.ris.a)) d.ris.a = a_new;
        }

        if (flags.theta1) {
            const Theta1Objective obj(model, d);
            const RcgResult r = rcg_minimize([&](const cvec& x) { return obj.value(x); },
                                             [&](const cvec& x) { return obj.egrad(x); },
                                             CirclePoint::normalized(d.ris.theta1), config.rcg);
            rec.l1 = r.iterations;
            if (std::isfinite(model.p_r2)) {
                DesignPoint trial = d;
                trial.ris.theta1 = r.point.values();
                const double pw = ris2_power(model, trial);
                if (pw > model.p_r2) {
                    trial.ris.a *= std::sqrt(model.p_r2 / pw);
                    // Shrinking the gains can cost more than the phase step gained.
                    if (evaluate(model, trial).r_oam >= evaluate(model, d).r_oam) {
                        d = std::move(trial);
                        rec.repaired = true;
                    }
                } else {
                    d = std::move(trial);
                }
            } else {
                d.ris.theta1 = r.point.values();
            }
        }

        if (flags.theta2) {
            const Theta2Objective obj(model, d);
            const RcgResult r = rcg_minimize([&](const cvec& x) { return obj.value(x); },
                                             [&](const cvec& x) { return obj.egrad(x); },
                                             CirclePoint::normalized(d.ris.theta2), config.rcg);
            d.ris.theta2 = r.point.values();
            rec.l2 = r.iterations;
        }

        rep = evaluate(model, d);
        rec.r_b = rep.r_b;
        rec.r_e = rep.r_e;
        rec.c_b = rep.c_b;
        rec.r_oam = rep.r_oam;
        rec.ris2_power = rep.ris2_power;
        res.trace.records.push_back(rec);
        if (rep.r_oam > res.report.r_oam) {
            res.report = rep;
            res.design = d;
        }
        if (std::abs(rep.r_oam - prev) < config.outer_tolerance) {
            res.converged = true;
            break;
        }
        prev = rep.r_oam;
    }
    return res;
}

}  // namespace oamsec
