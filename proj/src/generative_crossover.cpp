#include "ddtopo/generative_crossover.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "ddtopo/common.hpp"

namespace ddtopo {

namespace {

void add_bias(Matrix& m, const Matrix& b) {
    for (int i = 0; i < m.rows; ++i) {
        double* r = m.row(i);
        const double* br = b.row(0);
        for (int j = 0; j < m.cols; ++j) r[j] += br[j];
    }
}

Matrix relu(const Matrix& m) {
    Matrix out = m;
    for (double& v : out.a) v = v > 0.0 ? v : 0.0;
    return out;
}

Matrix colsum(const Matrix& m) {
    Matrix out(1, m.cols);
    for (int i = 0; i < m.rows; ++i) {
        const double* r = m.row(i);
        for (int j = 0; j < m.cols; ++j) out.a[j] += r[j];
    }
    return out;
}

Matrix glorot(int rows, int cols, std::mt19937_64& rng) {
    const double bound = std::sqrt(6.0 / (rows + cols));
    std::uniform_real_distribution<double> u(-bound, bound);
    Matrix m(rows, cols);
    for (double& v : m.a) v = u(rng);
    return m;
}

struct Forward {
    Matrix pre1, h1, mu, lv, sigma, z, pre2, h2, y;
};

Forward forward_pass(const VaeModel& m, const Matrix& X, const Matrix& eps) {
    Forward f;
    f.pre1 = matmul_nn(X, m.w1);
    add_bias(f.pre1, m.b1);
    f.h1 = relu(f.pre1);
    f.mu = matmul_nn(f.h1, m.wm);
    add_bias(f.mu, m.bm);
    f.lv = matmul_nn(f.h1, m.wv);
    add_bias(f.lv, m.bv);
    f.sigma = f.lv;
    for (double& v : f.sigma.a) v = std::exp(0.5 * v);
    f.z = f.mu;
    for (std::size_t i = 0; i < f.z.a.size(); ++i) f.z.a[i] += f.sigma.a[i] * eps.a[i];
    f.pre2 = matmul_nn(f.z, m.w2);
    add_bias(f.pre2, m.b2);
    f.h2 = relu(f.pre2);
    f.y = matmul_nn(f.h2, m.w3);
    add_bias(f.y, m.b3);
    for (double& v : f.y.a) v = 1.0 / (1.0 + std::exp(-v));
    return f;
}

Matrix fields_to_matrix(const std::vector<const DensityField*>& fields) {
    Matrix X(static_cast<int>(fields.size()), static_cast<int>(fields[0]->values.size()));
    for (int i = 0; i < X.rows; ++i)
        std::copy(fields[i]->values.begin(), fields[i]->values.end(), X.row(i));
    return X;
}

}  // namespace

std::vector<Matrix*> VaeModel::parameters() {
    return {&w1, &b1, &wm, &bm, &wv, &bv, &w2, &b2, &w3, &b3};
}
std::vector<const Matrix*> VaeModel::parameters() const {
    return {&w1, &b1, &wm, &bm, &wv, &bv, &w2, &b2, &w3, &b3};
}
std::vector<Matrix*> VaeGradients::parameters() {
    return {&w1, &b1, &wm, &bm, &wv, &bv, &w2, &b2, &w3, &b3};
}

VaeModel make_vae(MaskPtr mask, int hidden, int latent, std::mt19937_64& rng) {
    if (!mask) throw std::invalid_argument("make_vae: null mask");
    VaeModel m;
    m.mask = std::move(mask);
    m.input_dim = m.mask->active_count();
    m.hidden_dim = hidden;
    m.latent_dim = latent;
    m.w1 = glorot(m.input_dim, hidden, rng);
    m.b1 = Matrix(1, hidden);
    m.wm = glorot(hidden, latent, rng);
    m.bm = Matrix(1, latent);
    m.wv = glorot(hidden, latent, rng);
    m.bv = Matrix(1, latent);
    m.w2 = glorot(latent, hidden, rng);
    m.b2 = Matrix(1, hidden);
    m.w3 = glorot(hidden, m.input_dim, rng);
    m.b3 = Matrix(1, m.input_dim);
    return m;
}

double vae_loss_and_grads(const VaeModel& m, const Matrix& X, const Matrix& eps,
                          double kl_weight, VaeGradients* grads) {
    const int B = X.rows, N = X.cols, L = m.latent_dim;
    if (N != m.input_dim) throw std::invalid_argument("vae_loss_and_grads: input size");
    if (eps.rows != B || eps.cols != L) throw std::invalid_argument("vae_loss_and_grads: eps shape");

    const Forward f = forward_pass(m, X, eps);

    double recon = 0.0;
    for (std::size_t i = 0; i < f.y.a.size(); ++i) {
        const double d = f.y.a[i] - X.a[i];
        recon += d * d;
    }
    recon /= static_cast<double>(B) * N;

    double kl = 0.0;
    for (std::size_t i = 0; i < f.mu.a.size(); ++i)
        kl += -0.5 * (1.0 + f.lv.a[i] - f.mu.a[i] * f.mu.a[i] - std::exp(f.lv.a[i]));
    kl /= B;

    const double loss = recon + kl_weight * kl;
    if (!grads) return loss;

    // dL/dpre3 through the sigmoid
    Matrix dpre3(B, N);
    const double rs = 2.0 / (static_cast<double>(B) * N);
    for (std::size_t i = 0; i < dpre3.a.size(); ++i) {
        const double y = f.y.a[i];
        dpre3.a[i] = rs * (y - X.a[i]) * y * (1.0 - y);
    }
    grads->w3 = matmul_tn(f.h2, dpre3);
    grads->b3 = colsum(dpre3);

    Matrix dh2 = matmul_nt(dpre3, m.w3);
    for (std::size_t i = 0; i < dh2.a.size(); ++i)
        if (f.pre2.a[i] <= 0.0) dh2.a[i] = 0.0;
    grads->w2 = matmul_tn(f.z, dh2);
    grads->b2 = colsum(dh2);

    Matrix dz = matmul_nt(dh2, m.w2);

    Matrix dmu = dz;
    Matrix dlv(B, L);
    const double ks = kl_weight / B;
    for (std::size_t i = 0; i < dz.a.size(); ++i) {
        dmu.a[i] += ks * f.mu.a[i];
        dlv.a[i] = dz.a[i] * eps.a[i] * 0.5 * f.sigma.a[i] + 0.5 * ks * (std::exp(f.lv.a[i]) - 1.0);
    }
    grads->wm = matmul_tn(f.h1, dmu);
    grads->bm = colsum(dmu);
    grads->wv = matmul_tn(f.h1, dlv);
    grads->bv = colsum(dlv);

    Matrix dh1 = matmul_nt(dmu, m.wm);
    const Matrix dh1v = matmul_nt(dlv, m.wv);
    for (std::size_t i = 0; i < dh1.a.size(); ++i) {
        dh1.a[i] += dh1v.a[i];
        if (f.pre1.a[i] <= 0.0) dh1.a[i] = 0.0;
    }
    grads->w1 = matmul_tn(X, dh1);
    grads->b1 = colsum(dh1);
    return loss;
}

TrainResult train_vae(const std::vector<DensityField>& data, const TrainConfig& cfg,
                      std::mt19937_64& rng, int hidden, int latent) {
    if (data.empty()) throw std::invalid_argument("train_vae: no data");
    if (cfg.epochs < 1 || cfg.batch < 1 || cfg.learning_rate <= 0.0 || cfg.kl_weight < 0.0)
        throw std::invalid_argument("train_vae: bad config");
    for (const DensityField& f : data)
        if (!f.mask->same_grid(*data.front().mask))
            throw std::invalid_argument("train_vae: mixed masks");

    TrainResult out;
    out.model = make_vae(data.front().mask, hidden, latent, rng);
    VaeModel& m = out.model;

    // Adam state
    std::vector<Matrix*> params = m.parameters();
    std::vector<Matrix> mom1, mom2;
    for (Matrix* p : params) {
        mom1.emplace_back(p->rows, p->cols);
        mom2.emplace_back(p->rows, p->cols);
    }
    const double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;
    long step = 0;

    const int n = static_cast<int>(data.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    VaeGradients grads;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        int batches = 0;
        for (int b0 = 0; b0 < n; b0 += cfg.batch) {
            const int bs = std::min(cfg.batch, n - b0);
            std::vector<const DensityField*> batch(bs);
            for (int i = 0; i < bs; ++i) batch[i] = &data[order[b0 + i]];
            const Matrix X = fields_to_matrix(batch);
            Matrix eps(bs, latent);
            for (double& v : eps.a) v = gauss(rng);

            epoch_loss += vae_loss_and_grads(m, X, eps, cfg.kl_weight, &grads);
            ++batches;

            ++step;
            const double corr =
                cfg.learning_rate * std::sqrt(1.0 - std::pow(beta2, step)) /
                (1.0 - std::pow(beta1, step));
            std::vector<Matrix*> gs = grads.parameters();
            for (std::size_t k = 0; k < params.size(); ++k) {
                double* w = params[k]->a.data();
                const double* g = gs[k]->a.data();
                double* m1 = mom1[k].a.data();
                double* m2 = mom2[k].a.data();
                const std::size_t cnt = params[k]->a.size();
                for (std::size_t i = 0; i < cnt; ++i) {
                    m1[i] = beta1 * m1[i] + (1.0 - beta1) * g[i];
                    m2[i] = beta2 * m2[i] + (1.0 - beta2) * g[i] * g[i];
                    w[i] -= corr * m1[i] / (std::sqrt(m2[i]) + adam_eps);
                }
            }
        }
        out.epoch_loss.push_back(epoch_loss / batches);
    }
    return out;
}

std::pair<std::vector<double>, std::vector<double>> encode(const VaeModel& m,
                                                           const DensityField& field) {
    if (static_cast<int>(field.values.size()) != m.input_dim)
        throw std::invalid_argument("encode: field size mismatch");
    Matrix X(1, m.input_dim);
    std::copy(field.values.begin(), field.values.end(), X.row(0));
    Matrix eps(1, m.latent_dim);  // zeros; z unused
    const Forward f = forward_pass(m, X, eps);
    std::vector<double> mu(f.mu.a), sigma(f.sigma.a);
    return {std::move(mu), std::move(sigma)};
}

std::vector<double> reparameterize(const std::vector<double>& mu, const std::vector<double>& sigma,
                                   std::mt19937_64& rng) {
    if (mu.size() != sigma.size()) throw std::invalid_argument("reparameterize: size mismatch");
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> z(mu.size());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = mu[i] + sigma[i] * gauss(rng);
    return z;
}

DensityField decode(const VaeModel& m, const std::vector<double>& z) {
    if (static_cast<int>(z.size()) != m.latent_dim)
        throw std::invalid_argument("decode: latent size mismatch");
    Matrix pre2(1, m.hidden_dim);
    for (int j = 0; j < m.hidden_dim; ++j) {
        double s = m.b2(0, j);
        for (int k = 0; k < m.latent_dim; ++k) s += z[k] * m.w2(k, j);
        pre2(0, j) = s > 0.0 ? s : 0.0;
    }
    std::vector<double> v(m.input_dim);
    for (int j = 0; j < m.input_dim; ++j) {
        double s = m.b3(0, j);
        for (int k = 0; k < m.hidden_dim; ++k) s += pre2(0, k) * m.w3(k, j);
        v[j] = 1.0 / (1.0 + std::exp(-s));
    }
    return DensityField(m.mask, std::move(v));
}

std::vector<std::vector<double>> spx_sample(const std::vector<std::vector<double>>& parents,
                                            const SpxConfig& cfg, std::mt19937_64& rng) {
    const int k = cfg.parents_per_group;
    if (static_cast<int>(parents.size()) != k)
        throw std::invalid_argument("spx_sample: parent group size mismatch");
    if (k < 2) throw std::invalid_argument("spx_sample: need at least 2 parents");
    const std::size_t dim = parents[0].size();
    for (const auto& p : parents)
        if (p.size() != dim) throw std::invalid_argument("spx_sample: ragged parents");

    std::vector<double> g(dim, 0.0);
    for (const auto& p : parents)
        for (std::size_t d = 0; d < dim; ++d) g[d] += p[d];
    for (double& v : g) v /= k;

    // expanded vertices x_i = g + expansion * (p_i - g)
    std::vector<std::vector<double>> x(k, std::vector<double>(dim));
    for (int i = 0; i < k; ++i)
        for (std::size_t d = 0; d < dim; ++d)
            x[i][d] = g[d] + cfg.expansion * (parents[i][d] - g[d]);

    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<std::vector<double>> offspring;
    offspring.reserve(cfg.offspring_count);
    std::vector<double> c(dim), prev_c(dim);
    for (int o = 0; o < cfg.offspring_count; ++o) {
        std::fill(prev_c.begin(), prev_c.end(), 0.0);
        for (int i = 1; i < k; ++i) {
            const double r = std::pow(unif(rng), 1.0 / i);
            for (std::size_t d = 0; d < dim; ++d)
                c[d] = r * (x[i - 1][d] - x[i][d] + prev_c[d]);
            std::swap(c, prev_c);
        }
        std::vector<double> child(dim);
        for (std::size_t d = 0; d < dim; ++d) child[d] = x[k - 1][d] + prev_c[d];
        offspring.push_back(std::move(child));
    }
    return offspring;
}

std::vector<DensityField> crossover(const Population& pop, int n_vae, const TrainConfig& tcfg,
                                    const SpxConfig& scfg, std::mt19937_64& rng,
                                    double binarize_threshold, std::vector<double>* loss_history,
                                    int hidden, int latent, VaeModel* out_model) {
    const int np = static_cast<int>(pop.members.size());
    if (np < scfg.parents_per_group)
        throw std::invalid_argument("crossover: population smaller than an SPX parent group");

    std::vector<DensityField> data;
    data.reserve(np);
    for (const Candidate& c : pop.members) data.push_back(c.field);

    TrainResult tr = train_vae(data, tcfg, rng, hidden, latent);
    if (loss_history) *loss_history = tr.epoch_loss;

    // parent genotypes: encoded means (no reparameterization noise)
    std::vector<std::vector<double>> latents(np);
    for (int i = 0; i < np; ++i) latents[i] = encode(tr.model, data[i]).first;

    std::vector<DensityField> out;
    out.reserve(n_vae);
    std::vector<int> idx(np);
    std::iota(idx.begin(), idx.end(), 0);
    const long budget = 10L * n_vae;
    long attempts = 0;
    SpxConfig one = scfg;
    one.offspring_count = 1;
    while (static_cast<int>(out.size()) < n_vae) {
        if (attempts++ >= budget)
            throw std::runtime_error("crossover: offspring kept binarizing to void");
        // draw a distinct parent group
        for (int i = 0; i < one.parents_per_group; ++i) {
            std::uniform_int_distribution<int> pick(i, np - 1);
            std::swap(idx[i], idx[pick(rng)]);
        }
        std::vector<std::vector<double>> group(one.parents_per_group);
        for (int i = 0; i < one.parents_per_group; ++i) group[i] = latents[idx[i]];
        const std::vector<double> child = spx_sample(group, one, rng)[0];
        DensityField field = decode(tr.model, child);
        const BinaryImage img = binarize(field, binarize_threshold);
        bool any_solid = false;
        for (std::uint8_t w : img.white)
            if (!w) {
                any_solid = true;
                break;
            }
        if (any_solid) out.push_back(std::move(field));
    }
    if (out_model) *out_model = std::move(tr.model);
    return out;
}

void save_vae(const VaeModel& m, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("save_vae: cannot open " + path);
    f << "ddtopo-vae 1\n"
      << "dims " << m.input_dim << " " << m.hidden_dim << " " << m.latent_dim << "\n"
      << "seed " << m.train_seed << "\n"
      << "end\n";
    for (const Matrix* p : m.parameters())
        f.write(reinterpret_cast<const char*>(p->a.data()),
                static_cast<std::streamsize>(p->a.size() * sizeof(double)));
    if (!f) throw std::runtime_error("save_vae: write failed");
}

VaeModel load_vae(const std::string& path, const MaskPtr& mask) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("load_vae: cannot open " + path);
    std::string magic;
    int version = 0;
    f >> magic >> version;
    if (magic != "ddtopo-vae" || version != 1)
        throw std::runtime_error("load_vae: not a ddtopo-vae file");
    std::string key;
    int in = 0, hid = 0, lat = 0;
    std::uint64_t seed = 0;
    f >> key >> in >> hid >> lat;
    if (key != "dims") throw std::runtime_error("load_vae: malformed header");
    f >> key >> seed;
    if (key != "seed") throw std::runtime_error("load_vae: malformed header");
    f >> key;
    if (key != "end") throw std::runtime_error("load_vae: malformed header");
    f.get();  // newline before the binary block

    if (mask->active_count() != in) throw std::runtime_error("load_vae: mask/input size mismatch");
    std::mt19937_64 dummy(0);
    VaeModel m = make_vae(mask, hid, lat, dummy);
    m.train_seed = seed;
    for (Matrix* p : m.parameters()) {
        f.read(reinterpret_cast<char*>(p->a.data()),
               static_cast<std::streamsize>(p->a.size() * sizeof(double)));
        if (!f) throw std::runtime_error("load_vae: truncated weight block");
    }
    return m;
}

}  // namespace ddtopo
