#ifndef CARNOT_EXAMPLES_HPP
#define CARNOT_EXAMPLES_HPP

#include <functional>
#include <memory>
#include <string>

#include "carnot/curvature.hpp"

namespace carnot {

// One of the closed-form example families, bundling the group, an analytic
// defining function and the closed-form oracles used as ground truth.
// sigma_h_density is relative to the family's canonical chart (vplane: drop
// the dominant direction axis; nvplane: drop x_alpha'; hparab: drop t).
struct ExampleSurface {
    std::string id;
    std::shared_ptr<const CarnotGroup> group;
    ScalarField f;
    int chart_axis = 0;  // canonical graph coordinate (0-based)

    std::function<double(const Vec&)> p_h_norm;
    std::function<Vec(const Vec&)> varpi;  // length n-h
    std::function<double(const Vec&)> h_cc;
    std::function<double(const Vec&)> b2, s2, a2;
    std::function<double(const Vec&)> b_ts;
    std::function<double(const Vec&)> sigma_h_density;
    std::function<bool(const Vec&)> characteristic_locus;
};

// Vertical hyperplane {<d, x_H> = 0}: non-characteristic, flat, B_TS = 0.
ExampleSurface vertical_hyperplane(std::shared_ptr<const CarnotGroup> g, const Vec& direction);

// Non-vertical hyperplane {x_alpha' = 0} in a 2-step group; alpha' is the
// 0-based coordinate index of a vertical direction.
ExampleSurface nonvertical_hyperplane(std::shared_ptr<const CarnotGroup> g, int alpha);

// Hyperbolic paraboloid t = (|x|^2 - |y|^2)/4 in H^n.
ExampleSurface hyperbolic_paraboloid(int n);

// Lookup by CLI id ("vplane" | "nvplane" | "hparab").
ExampleSurface builtin_example(const std::string& id, std::shared_ptr<const CarnotGroup> g);

}  // namespace carnot

#endif
