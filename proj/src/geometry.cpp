#include "oamsec/geometry.hpp"

#include <cmath>

#include "oamsec/error.hpp"

namespace oamsec {

Mat3 rotation_matrix_x(double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    Mat3 r;
    r << 1, 0, 0,
         0, c, -s,
         0, s, c;
    return r;
}

Mat3 rotation_matrix_y(double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    Mat3 r;
    r << c, 0, s,
         0, 1, 0,
         -s, 0, c;
    return r;
}

Mat3 Attitude::matrix() const { return rotation_matrix_y(rot_y) * rotation_matrix_x(rot_x); }

double UcaSpec::azimuth(int n) const { return 2.0 * kPi * n / count + initial_azimuth; }

Positions uca_element_positions(const UcaSpec& spec) {
    if (spec.count <= 0) throw GeometryError("UCA element count must be positive");
    if (!(spec.radius > 0.0)) throw GeometryError("UCA radius must be positive");
    const Mat3 r = spec.attitude.matrix();
    Positions out(3, spec.count);
    for (int n = 0; n < spec.count; ++n) {
        const double phi = spec.azimuth(n);
        out.col(n) = spec.center + r * Vec3(spec.radius * std::cos(phi), spec.radius * std::sin(phi), 0.0);
    }
    return out;
}

Positions ris_element_positions(const RisSpec& spec) {
    if (spec.count_y <= 0 || spec.count_z <= 0) throw GeometryError("RIS grid counts must be positive");
    const Mat3 r = spec.attitude.matrix();
    Positions out(3, spec.count());
    const double cy = 0.5 * (1.0 + spec.count_y);
    const double cz = 0.5 * (1.0 + spec.count_z);
    for (int qz = 1; qz <= spec.count_z; ++qz) {
        for (int qy = 1; qy <= spec.count_y; ++qy) {
            const Vec3 local(0.0, spec.spacing_y * (qy - cy), spec.spacing_z * (qz - cz));
            out.col((qz - 1) * spec.count_y + (qy - 1)) = spec.center + r * local;
        }
    }
    return out;
}

Vec3 eve_center(double D, double theta, double varphi) {
    return Vec3(D * std::sin(varphi) * std::cos(theta), D * std::sin(varphi) * std::sin(theta), D * std::cos(varphi));
}

std::pair<int, int> grid_dims(int q) {
    if (q <= 0) throw GeometryError("RIS element count must be positive");
    int qy = 1;
    for (int d = 1; d * d <= q; ++d)
        if (q % d == 0) qy = d;
    return {qy, q / qy};
}

}  // namespace oamsec
