#pragma once

#include <cstdint>
#include <memory>
#include <vector>

namespace ddtopo {

// Masked structured grid of unit square cells. Cells are stored row-major
// with the origin at the lower-left cell, x fastest; one cell = one finite
// element = one image pixel, so FEM densities and homology input share a
// single indexing.
struct DomainMask {
    enum class Kind { Full, LBracket };

    int nx = 0, ny = 0;
    std::vector<std::uint8_t> active;  // nx*ny, 1 = inside the design domain

    Kind kind = Kind::Full;
    int cut_num = 0, cut_den = 0;  // L-bracket cut ratio (e.g. 3/5)

    std::vector<std::int32_t> cell_to_active;  // nx*ny -> active index, -1 outside
    std::vector<std::int32_t> active_cells;    // active index -> y*nx + x

    int cell(int x, int y) const { return y * nx + x; }
    bool is_active(int x, int y) const { return active[cell(x, y)] != 0; }
    int active_count() const { return static_cast<int>(active_cells.size()); }
    bool same_grid(const DomainMask& o) const {
        return nx == o.nx && ny == o.ny && active == o.active;
    }
};

using MaskPtr = std::shared_ptr<const DomainMask>;

MaskPtr full_mask(int nx, int ny);

// n x n grid with the upper-right (n*cut_num/cut_den)^2 block removed.
// Requires n >= cut_den and n divisible by cut_den; throws std::invalid_argument
// otherwise. The default 3/5 cut gives the usual L-bracket (arm width 2n/5,
// active count n^2 - (3n/5)^2).
MaskPtr lbracket_mask(int n, int cut_num = 3, int cut_den = 5);

// Material densities over the active cells of a mask, each value in [0,1].
struct DensityField {
    MaskPtr mask;
    std::vector<double> values;  // one per active cell

    DensityField() = default;
    DensityField(MaskPtr m, std::vector<double> v);
    static DensityField uniform(MaskPtr m, double v);

    double at_cell(int x, int y) const {
        const std::int32_t k = mask->cell_to_active[mask->cell(x, y)];
        return k < 0 ? 0.0 : values[k];
    }
};

// Full-bounding-box binary image; white = void, black = material. Inactive
// cells render as void (the L-bracket cut-out is physically empty).
struct BinaryImage {
    int width = 0, height = 0;
    std::vector<std::uint8_t> white;  // 1 = white(void), 0 = black(material)

    int idx(int x, int y) const { return y * width + x; }
    bool is_white(int x, int y) const { return white[idx(x, y)] != 0; }
};

// Active cells with value >= threshold become material. 0 < threshold < 1.
BinaryImage binarize(const DensityField& field, double threshold);

// (sum_e |a_e - b_e|^p)^(1/p) over active cells (unit cell area). The fields
// must live on the same grid; p >= 1.
double lp_norm_diff(const DensityField& a, const DensityField& b, double p);

// Mean density over active cells, in [0,1].
double volume_fraction(const DensityField& field);

// Reinterprets a binary image as a 0/1 density field on the given mask
// (inactive pixels ignored).
DensityField field_from_image(const BinaryImage& img, const MaskPtr& mask);

}  // namespace ddtopo
