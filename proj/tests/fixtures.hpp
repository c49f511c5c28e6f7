#pragma once

#include <numbers>

#include "magbeam/beam.hpp"
#include "magbeam/equilibrium.hpp"
#include "magbeam/geomag.hpp"

namespace fixtures {

using namespace magbeam;

inline constexpr double kDeg = std::numbers::pi / 180.0;

// 150 mm PTFE tube (OD 1.8 / ID 1.2 mm, E = 766 MPa), two 4/2/0.5 mm N52 rings
// at the tip with no spacer, 76.2 x 38.1 mm N52 source 80 mm beyond the straight
// tip, moment along -x.
inline equilibrium::Model demonstrator(double ke = 0.009, double kb = 4.03,
                                       beam::BeamFormulation mode = beam::BeamFormulation::corrected,
                                       double separation = 0.0) {
    equilibrium::Model m;
    m.params.length = 0.150;
    m.params.elastic_modulus = 766e6;
    m.params.section_moment = beam::section_moment_tube(1.8e-3, 1.2e-3);
    m.params.stiffness_scale = ke;
    const double tip_moment = geomag::magnet_moment_from_geometry(4e-3, 2e-3, 0.5e-3, geomag::kRemanenceN52);
    m.pair = geomag::RingPairConfig::make(tip_moment, 0.0, 0.0, separation);
    const double ext = geomag::magnet_moment_from_geometry(76.2e-3, 0.0, 38.1e-3, geomag::kRemanenceN52);
    m.source = {Vec3(-ext, 0.0, 0.0), Vec3(0.230, 0.0, 0.0)};
    m.cal.k_b = kb;
    m.mode = mode;
    return m;
}

inline equilibrium::Model with_angles(equilibrium::Model m, double theta1, double theta2) {
    m.pair = m.pair.with_angles(theta1, theta2);
    return m;
}

}  // namespace fixtures
