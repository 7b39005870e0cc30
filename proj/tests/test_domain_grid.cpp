#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <random>

#include "doctest.h"
#include "ddtopo/domain_grid.hpp"
#include "ddtopo/io_formats.hpp"
#include "oracles.hpp"

using namespace ddtopo;

TEST_CASE("lbracket mask active counts") {
    CHECK(lbracket_mask(100)->active_count() == 6400);
    CHECK(lbracket_mask(5)->active_count() == 16);
    // n=50 against a brute-force mask construction
    const MaskPtr m = lbracket_mask(50);
    int count = 0;
    for (int y = 0; y < 50; ++y)
        for (int x = 0; x < 50; ++x)
            if (!(x >= 20 && y >= 20)) ++count;
    CHECK(m->active_count() == count);
    CHECK(count == 1600);
    // the cut block is inactive, the arms are active
    CHECK(!m->is_active(49, 49));
    CHECK(m->is_active(0, 49));
    CHECK(m->is_active(49, 0));
}

TEST_CASE("lbracket mask rejects bad resolutions") {
    CHECK_THROWS_AS(lbracket_mask(4), std::invalid_argument);
    CHECK_THROWS_AS(lbracket_mask(51), std::invalid_argument);
    CHECK_THROWS_AS(lbracket_mask(0), std::invalid_argument);
    CHECK_THROWS_AS(lbracket_mask(10, 5, 5), std::invalid_argument);
}

TEST_CASE("binarize basics") {
    const MaskPtr full = full_mask(4, 4);
    const BinaryImage ones = binarize(DensityField::uniform(full, 1.0), 0.5);
    for (auto px : ones.white) CHECK(px == 0);
    const BinaryImage zeros = binarize(DensityField::uniform(full, 0.0), 0.5);
    for (auto px : zeros.white) CHECK(px == 1);

    const MaskPtr lb = lbracket_mask(5);
    const BinaryImage img = binarize(DensityField::uniform(lb, 1.0), 0.5);
    int black = 0, white = 0;
    for (auto px : img.white) (px ? white : black)++;
    CHECK(black == 16);
    CHECK(white == 9);
    // cut region renders as void
    CHECK(img.is_white(4, 4));
    CHECK(!img.is_white(0, 0));

    CHECK_THROWS_AS(binarize(DensityField::uniform(full, 0.5), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(binarize(DensityField::uniform(full, 0.5), 1.0), std::invalid_argument);
}

TEST_CASE("binarize is idempotent on its own output") {
    std::mt19937_64 rng(7);
    const MaskPtr lb = lbracket_mask(10);
    for (int trial = 0; trial < 20; ++trial) {
        const DensityField f = oracles::random_field(lb, rng);
        const BinaryImage img = binarize(f, 0.5);
        const DensityField as_field = field_from_image(img, lb);
        const BinaryImage img2 = binarize(as_field, 0.5);
        CHECK(img.white == img2.white);
    }
}

TEST_CASE("lp_norm_diff examples") {
    const MaskPtr m = full_mask(4, 4);  // 16 active cells
    const DensityField a = DensityField::uniform(m, 1.0);
    const DensityField b = DensityField::uniform(m, 0.0);
    CHECK(lp_norm_diff(a, a, 2.0) == 0.0);
    CHECK(lp_norm_diff(a, b, 2.0) == doctest::Approx(4.0).epsilon(1e-14));

    // p = 1 equals a direct absolute-difference sum
    std::mt19937_64 rng(3);
    const MaskPtr m10 = full_mask(5, 2);
    const DensityField x = oracles::random_field(m10, rng);
    const DensityField y = oracles::random_field(m10, rng);
    double direct = 0.0;
    for (int i = 0; i < 10; ++i) direct += std::fabs(x.values[i] - y.values[i]);
    CHECK(lp_norm_diff(x, y, 1.0) == doctest::Approx(direct).epsilon(1e-14));

    const MaskPtr other = full_mask(2, 5);
    CHECK_THROWS_AS(lp_norm_diff(x, oracles::random_field(other, rng), 2.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(lp_norm_diff(x, y, 0.5), std::invalid_argument);
}

TEST_CASE("lp_norm_diff metric axioms on random triples") {
    std::mt19937_64 rng(11);
    const MaskPtr m = lbracket_mask(10);
    for (int trial = 0; trial < 50; ++trial) {
        const DensityField a = oracles::random_field(m, rng);
        const DensityField b = oracles::random_field(m, rng);
        const DensityField c = oracles::random_field(m, rng);
        const double ab = lp_norm_diff(a, b, 2.0);
        const double ba = lp_norm_diff(b, a, 2.0);
        const double ac = lp_norm_diff(a, c, 2.0);
        const double cb = lp_norm_diff(c, b, 2.0);
        CHECK(ab >= 0.0);
        CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
        CHECK(ab <= ac + cb + 1e-12);
        CHECK(lp_norm_diff(a, a, 2.0) == 0.0);
    }
}

TEST_CASE("volume_fraction") {
    const MaskPtr m = full_mask(4, 4);
    CHECK(volume_fraction(DensityField::uniform(m, 1.0)) == 1.0);
    CHECK(volume_fraction(DensityField::uniform(m, 0.0)) == 0.0);
    std::vector<double> v(16, 0.0);
    for (int i = 0; i < 8; ++i) v[i] = 1.0;
    CHECK(volume_fraction(DensityField(m, v)) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("binarized volume bound") {
    std::mt19937_64 rng(23);
    const MaskPtr m = lbracket_mask(10);
    for (int trial = 0; trial < 50; ++trial) {
        const DensityField f = oracles::random_field(m, rng);
        const double thr = 0.5;
        const DensityField b = field_from_image(binarize(f, thr), m);
        CHECK(volume_fraction(b) <= volume_fraction(f) + thr + 1e-12);
    }
}

TEST_CASE("density field validation") {
    const MaskPtr m = full_mask(2, 2);
    CHECK_THROWS_AS(DensityField(m, std::vector<double>{0.1, 0.2}), std::invalid_argument);
    CHECK_THROWS_AS(DensityField(m, std::vector<double>{0.1, 0.2, 0.3, 1.3}),
                    std::invalid_argument);
    CHECK_THROWS_AS(DensityField(m, std::vector<double>{-0.1, 0.2, 0.3, 0.9}),
                    std::invalid_argument);
}

TEST_CASE("pgm round trip") {
    std::mt19937_64 rng(5);
    const char* path = "test_field.pgm";

    // quantized values survive exactly
    const MaskPtr lb = lbracket_mask(10);
    std::vector<double> v(lb->active_count());
    std::uniform_int_distribution<int> level(0, 255);
    for (double& x : v) x = level(rng) / 255.0;
    const DensityField f(lb, v);
    write_density_pgm(f, path);
    const DensityField back = read_density_pgm(path);
    CHECK(back.mask->same_grid(*lb));
    CHECK(back.mask->kind == DomainMask::Kind::LBracket);
    for (int i = 0; i < lb->active_count(); ++i)
        CHECK(back.values[i] == doctest::Approx(f.values[i]).epsilon(1e-12));

    // full-mask variant
    const MaskPtr fm = full_mask(7, 3);
    const DensityField g = field_from_image(binarize(oracles::random_field(fm, rng), 0.5), fm);
    write_density_pgm(g, path);
    const DensityField gback = read_density_pgm(path);
    CHECK(gback.mask->same_grid(*fm));
    CHECK(gback.values == g.values);

    std::remove(path);
    std::remove("test_field.pgm.meta");
}
