#pragma once

#include <array>
#include <cmath>

#include "magbeam/errors.hpp"

namespace magbeam::geomag {

template <typename Field>
Wrench tip_wrench_in(const RingPairConfig& pair, const TipPose& tip, const Field& field) {
    pair.validate();
    const Vec3& n = tip.tangent;
    require(std::abs(n.norm() - 1.0) <= 1e-9, "tip_wrench: tangent must have unit norm");

    Wrench w;
    const std::array<const RingMagnet*, 2> magnets{&pair.distal, &pair.proximal};
    for (const RingMagnet* magnet : magnets) {
        const Vec3 p_i = tip.position + magnet->axial_offset * n;
        const FieldSample sample = field(p_i);
        const Vec3 m_i = ring_dipole_moment(*magnet, n);
        w.force += sample.gradient.transpose() * m_i;
        w.torque += m_i.cross(sample.B);
    }
    w.torque += pair.separation * n.cross(w.force);
    return w;
}

}  // namespace magbeam::geomag
