#include "ddtopo/domain_grid.hpp"

#include <cmath>
#include <stdexcept>

namespace ddtopo {

namespace {

MaskPtr finalize(std::shared_ptr<DomainMask> m) {
    m->cell_to_active.assign(static_cast<std::size_t>(m->nx) * m->ny, -1);
    m->active_cells.clear();
    for (int c = 0; c < m->nx * m->ny; ++c) {
        if (m->active[c]) {
            m->cell_to_active[c] = static_cast<std::int32_t>(m->active_cells.size());
            m->active_cells.push_back(c);
        }
    }
    if (m->active_cells.empty()) throw std::invalid_argument("mask has no active cells");
    return m;
}

}  // namespace

MaskPtr full_mask(int nx, int ny) {
    if (nx < 1 || ny < 1) throw std::invalid_argument("full_mask: nx, ny must be >= 1");
    auto m = std::make_shared<DomainMask>();
    m->nx = nx;
    m->ny = ny;
    m->active.assign(static_cast<std::size_t>(nx) * ny, 1);
    m->kind = DomainMask::Kind::Full;
    return finalize(std::move(m));
}

MaskPtr lbracket_mask(int n, int cut_num, int cut_den) {
    if (cut_den < 1 || cut_num < 1 || cut_num >= cut_den)
        throw std::invalid_argument("lbracket_mask: cut ratio must be in (0,1)");
    if (n < cut_den || n % cut_den != 0)
        throw std::invalid_argument("lbracket_mask: n must be >= " + std::to_string(cut_den) +
                                    " and divisible by " + std::to_string(cut_den));
    const int cut = n / cut_den * cut_num;  // cut block side
    const int arm = n - cut;                // arm width
    auto m = std::make_shared<DomainMask>();
    m->nx = n;
    m->ny = n;
    m->active.assign(static_cast<std::size_t>(n) * n, 1);
    for (int y = arm; y < n; ++y)
        for (int x = arm; x < n; ++x) m->active[m->cell(x, y)] = 0;
    m->kind = DomainMask::Kind::LBracket;
    m->cut_num = cut_num;
    m->cut_den = cut_den;
    return finalize(std::move(m));
}

DensityField::DensityField(MaskPtr m, std::vector<double> v) : mask(std::move(m)), values(std::move(v)) {
    if (!mask) throw std::invalid_argument("DensityField: null mask");
    if (static_cast<int>(values.size()) != mask->active_count())
        throw std::invalid_argument("DensityField: values.size() != active cell count");
    for (double x : values)
        if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("DensityField: value outside [0,1]");
}

DensityField DensityField::uniform(MaskPtr m, double v) {
    if (!m) throw std::invalid_argument("DensityField::uniform: null mask");
    return DensityField(m, std::vector<double>(m->active_count(), v));
}

BinaryImage binarize(const DensityField& field, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0))
        throw std::invalid_argument("binarize: threshold must be in (0,1)");
    const DomainMask& m = *field.mask;
    BinaryImage img;
    img.width = m.nx;
    img.height = m.ny;
    img.white.assign(static_cast<std::size_t>(m.nx) * m.ny, 1);
    for (int k = 0; k < m.active_count(); ++k)
        if (field.values[k] >= threshold) img.white[m.active_cells[k]] = 0;
    return img;
}

double lp_norm_diff(const DensityField& a, const DensityField& b, double p) {
    if (!a.mask->same_grid(*b.mask)) throw std::invalid_argument("lp_norm_diff: mask mismatch");
    if (!(p >= 1.0)) throw std::invalid_argument("lp_norm_diff: p must be >= 1");
    double s = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        s += std::pow(std::fabs(a.values[i] - b.values[i]), p);
    return std::pow(s, 1.0 / p);
}

double volume_fraction(const DensityField& field) {
    double s = 0.0;
    for (double v : field.values) s += v;
    return s / static_cast<double>(field.values.size());
}

DensityField field_from_image(const BinaryImage& img, const MaskPtr& mask) {
    if (img.width != mask->nx || img.height != mask->ny)
        throw std::invalid_argument("field_from_image: size mismatch");
    std::vector<double> v(mask->active_count());
    for (int k = 0; k < mask->active_count(); ++k)
        v[k] = img.white[mask->active_cells[k]] ? 0.0 : 1.0;
    return DensityField(mask, std::move(v));
}

}  // namespace ddtopo
