#include "oamsec/channel.hpp"

#include <cmath>

#include "oamsec/error.hpp"

namespace oamsec {

namespace {

inline cplx los_entry(const Vec3& a, const Vec3& b, double beta, double wavelength) {
    const double d = (a - b).norm();
    if (!(d > 0.0)) throw SingularDistanceError("coincident transmit and receive elements");
    return (wavelength * beta / (4.0 * kPi * d)) * std::polar(1.0, -2.0 * kPi * d / wavelength);
}

void check_wavelength(double wavelength) {
    if (!(wavelength > 0.0)) throw ConfigError("wavelength must be positive");
}

}  // namespace

cmat los_channel_serial(const Positions& tx, const Positions& rx, double beta, double wavelength) {
    check_wavelength(wavelength);
    cmat h(rx.cols(), tx.cols());
    for (Eigen::Index r = 0; r < rx.cols(); ++r)
        for (Eigen::Index t = 0; t < tx.cols(); ++t)
            h(r, t) = los_entry(rx.col(r), tx.col(t), beta, wavelength);
    return h;
}

cmat los_channel(const Positions& tx, const Positions& rx, double beta, double wavelength) {
    check_wavelength(wavelength);
    const Eigen::Index rows = rx.cols(), cols = tx.cols();
    cmat h(rows, cols);
    bool singular = false;
#pragma omp parallel for schedule(static) reduction(|| : singular)
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index t = 0; t < cols; ++t) {
            const double d = (rx.col(r) - tx.col(t)).norm();
            if (!(d > 0.0)) {
                singular = true;
                h(r, t) = 0.0;
                continue;
            }
            h(r, t) = (wavelength * beta / (4.0 * kPi * d)) * std::polar(1.0, -2.0 * kPi * d / wavelength);
        }
    }
    if (singular) throw SingularDistanceError("coincident transmit and receive elements");
    return h;
}

ChannelSet build_channel_set(const Deployment& d) {
    const Positions a = uca_element_positions(d.alice);
    const Positions b = uca_element_positions(d.bob);
    const Positions e = uca_element_positions(d.eve);
    const Positions r1 = ris_element_positions(d.ris1);
    const Positions r2 = ris_element_positions(d.ris2);
    const LinkParams& l = d.links;
    ChannelSet c;
    c.ar1 = los_channel(a, r1, l.beta_ar1, l.wavelength);
    c.r1r2 = los_channel(r1, r2, l.beta_r1r2, l.wavelength);
    c.r2b = los_channel(r2, b, l.beta_r2b, l.wavelength);
    c.ae = los_channel(a, e, l.beta_ae, l.wavelength);
    c.r1e = los_channel(r1, e, l.beta_r1e, l.wavelength);
    return c;
}

ChannelSet build_single_ris_channel_set(const Deployment& d, int q) {
    RisSpec ris = d.ris2;
    const auto [qy, qz] = grid_dims(q);
    ris.count_y = qy;
    ris.count_z = qz;
    const Positions a = uca_element_positions(d.alice);
    const Positions b = uca_element_positions(d.bob);
    const Positions e = uca_element_positions(d.eve);
    const Positions r = ris_element_positions(ris);
    const LinkParams& l = d.links;
    ChannelSet c;
    c.ar1 = cmat::Identity(d.alice.count, d.alice.count);
    c.r1r2 = los_channel(a, r, l.beta_ar1, l.wavelength);
    c.r2b = los_channel(r, b, l.beta_r2b, l.wavelength);
    c.ae = los_channel(a, e, l.beta_ae, l.wavelength);
    c.r1e = cmat::Zero(d.eve.count, d.alice.count);
    return c;
}

}  // namespace oamsec
