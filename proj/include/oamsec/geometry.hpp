#pragma once

#include <utility>

#include "oamsec/types.hpp"

namespace oamsec {

struct Attitude {
    double rot_x = 0.0;
    double rot_y = 0.0;

    // R = R_y(rot_y) * R_x(rot_x)
    Mat3 matrix() const;
};

struct UcaSpec {
    Vec3 center = Vec3::Zero();
    double radius = 0.5;
    int count = 8;
    double initial_azimuth = 0.0;
    Attitude attitude;

    // Azimuth of element n (zero-based).
    double azimuth(int n) const;
};

struct RisSpec {
    Vec3 center = Vec3::Zero();
    int count_y = 1;
    int count_z = 1;
    double spacing_y = 0.05;
    double spacing_z = 0.05;
    Attitude attitude;

    int count() const { return count_y * count_z; }
};

Mat3 rotation_matrix_x(double angle);
Mat3 rotation_matrix_y(double angle);

Positions uca_element_positions(const UcaSpec& spec);

// Element (qy, qz) lands in column qz * count_y + qy.
Positions ris_element_positions(const RisSpec& spec);

Vec3 eve_center(double D, double theta, double varphi);

// Near-square (count_y, count_z) factorization used when only Q is given.
std::pair<int, int> grid_dims(int q);

}  // namespace oamsec
