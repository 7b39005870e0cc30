#include "ddtopo/persistence.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace ddtopo {

namespace {

constexpr int kInf = std::numeric_limits<int>::max() / 4;

// L1 distance to the nearest pixel with source[i] != 0, exact via the
// forward/backward chamfer passes (exact for the Manhattan metric).
std::vector<int> l1_distance(const std::vector<std::uint8_t>& source, int w, int h) {
    std::vector<int> d(static_cast<std::size_t>(w) * h, kInf);
    for (std::size_t i = 0; i < d.size(); ++i)
        if (source[i]) d[i] = 0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            int& v = d[y * w + x];
            if (x > 0) v = std::min(v, d[y * w + x - 1] + 1);
            if (y > 0) v = std::min(v, d[(y - 1) * w + x] + 1);
        }
    for (int y = h - 1; y >= 0; --y)
        for (int x = w - 1; x >= 0; --x) {
            int& v = d[y * w + x];
            if (x + 1 < w) v = std::min(v, d[y * w + x + 1] + 1);
            if (y + 1 < h) v = std::min(v, d[(y + 1) * w + x] + 1);
        }
    return d;
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n, -1) {}
    int find(int x) {
        int r = x;
        while (parent[r] >= 0) r = parent[r];
        while (parent[x] >= 0) {
            int nx = parent[x];
            parent[x] = r;
            x = nx;
        }
        return r;
    }
};

}  // namespace

LevelSetField signed_distance(const BinaryImage& img) {
    const int w = img.width, h = img.height;
    const std::size_t n = static_cast<std::size_t>(w) * h;
    bool any_white = false, any_black = false;
    for (std::uint8_t px : img.white) (px ? any_white : any_black) = true;
    if (!any_white || !any_black)
        throw std::invalid_argument("signed_distance: monochrome image has no boundary");

    std::vector<std::uint8_t> black(n);
    for (std::size_t i = 0; i < n; ++i) black[i] = img.white[i] ? 0 : 1;
    const std::vector<int> d_black = l1_distance(black, w, h);
    const std::vector<int> d_white = l1_distance(img.white, w, h);

    LevelSetField f;
    f.width = w;
    f.height = h;
    f.phi.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        f.phi[i] = img.white[i] ? -d_black[i] : d_white[i];
    return f;
}

int sublevel_components(const LevelSetField& f, int t) {
    const int w = f.width, h = f.height;
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(w) * h, 0);
    std::vector<int> stack;
    int comps = 0;
    for (int start = 0; start < w * h; ++start) {
        if (seen[start] || f.phi[start] > t) continue;
        ++comps;
        seen[start] = 1;
        stack.assign(1, start);
        while (!stack.empty()) {
            const int c = stack.back();
            stack.pop_back();
            const int x = c % w, y = c / w;
            const int nb[4] = {x > 0 ? c - 1 : -1, x + 1 < w ? c + 1 : -1,
                               y > 0 ? c - w : -1, y + 1 < h ? c + w : -1};
            for (int q : nb) {
                if (q < 0 || seen[q] || f.phi[q] > t) continue;
                seen[q] = 1;
                stack.push_back(q);
            }
        }
    }
    return comps;
}

PersistenceDiagram persistence_diagram_0d(const LevelSetField& f) {
    const int w = f.width, h = f.height;
    const int n = w * h;

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (f.phi[a] != f.phi[b]) return f.phi[a] < f.phi[b];
        return a < b;
    });

    UnionFind uf(n);
    std::vector<int> birth_phi(n), birth_px(n);
    std::vector<std::uint8_t> added(n, 0);
    PersistenceDiagram pd;

    for (const int p : order) {
        added[p] = 1;
        birth_phi[p] = f.phi[p];
        birth_px[p] = p;
        const int x = p % w, y = p / w;
        const int nb[4] = {x > 0 ? p - 1 : -1, x + 1 < w ? p + 1 : -1,
                           y > 0 ? p - w : -1, y + 1 < h ? p + w : -1};
        for (int q : nb) {
            if (q < 0 || !added[q]) continue;
            int ra = uf.find(p), rb = uf.find(q);
            if (ra == rb) continue;
            // elder rule: the component with the smaller (birth, birth pixel)
            // survives, the younger dies at the current level
            if (std::pair(birth_phi[ra], birth_px[ra]) > std::pair(birth_phi[rb], birth_px[rb]))
                std::swap(ra, rb);
            if (birth_phi[rb] < f.phi[p])
                pd.pairs.emplace_back(static_cast<double>(birth_phi[rb]),
                                      static_cast<double>(f.phi[p]));
            uf.parent[rb] = ra;
        }
    }
    std::sort(pd.pairs.begin(), pd.pairs.end());
    return pd;
}

PersistenceDiagram diagram_of(const DensityField& field, double threshold) {
    const BinaryImage img = binarize(field, threshold);
    bool any_white = false, any_black = false;
    for (std::uint8_t px : img.white) (px ? any_white : any_black) = true;
    if (!any_white || !any_black) return PersistenceDiagram{};  // single essential component
    return persistence_diagram_0d(signed_distance(img));
}

}  // namespace ddtopo
