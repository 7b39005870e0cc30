#pragma once

#include <utility>
#include <vector>

#include "ddtopo/domain_grid.hpp"

namespace ddtopo {

// Signed Manhattan distance per pixel: phi < 0 on white (void) pixels,
// phi > 0 on black (material) pixels, never zero -- the boundary lies
// between pixels, so values jump from -1 to +1 across it.
struct LevelSetField {
    int width = 0, height = 0;
    std::vector<int> phi;

    int idx(int x, int y) const { return y * width + x; }
};

// Finite birth-death pairs of the 0th persistent homology of the void
// regions, kept sorted by (birth, death). Zero-lifetime pairs are dropped
// and the essential class (the component of the globally first pixel, which
// never dies) is excluded. The image is not padded: there is no exterior,
// so boundary-formed voids are ordinary components and exactly one class is
// essential. (Image conventions of other PH packages may differ.)
struct PersistenceDiagram {
    std::vector<std::pair<double, double>> pairs;

    bool operator==(const PersistenceDiagram&) const = default;
};

// Exact two-pass L1 distance transform, signed by pixel color.
// Throws std::invalid_argument on monochrome images (no boundary exists).
LevelSetField signed_distance(const BinaryImage& img);

// Number of 4-connected components of {pixels : phi <= t}.
int sublevel_components(const LevelSetField& f, int t);

// Union-find sweep in increasing (phi, linear index) order. A component is
// born at the phi of its first pixel; on a merge the younger component dies
// (larger birth, ties by larger linear index of its birth pixel).
PersistenceDiagram persistence_diagram_0d(const LevelSetField& f);

// binarize -> signed_distance -> persistence_diagram_0d. Monochrome images
// short-circuit to an empty diagram (a single component is essential-only).
PersistenceDiagram diagram_of(const DensityField& field, double threshold);

}  // namespace ddtopo
