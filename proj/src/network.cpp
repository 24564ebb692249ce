#include "protoeval/network.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "protoeval/rng.hpp"

namespace protoeval {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double clamp_prob(double p) { return std::clamp(p, kProbEpsilon, 1.0 - kProbEpsilon); }

double sample_weight(int y, std::optional<int> r, double alpha) {
    return (r && *r == y) ? alpha + 1.0 : 1.0;
}

// Activations for one sample; scratch space reused across the batch.
struct ForwardState {
    std::vector<double> h1, h2;  // post-ReLU
    double z3 = 0.0;
    double p = 0.0;
};

void forward_into(const TrainedNetwork& net, std::span<const double> x, ForwardState& st) {
    const auto& [m, n1, n2, n3] = net.dims;
    st.h1.assign(n1, 0.0);
    for (std::size_t i = 0; i < n1; ++i) {
        double z = net.biases[0][i];
        const double* w = net.weights[0].data() + i * m;
        for (std::size_t j = 0; j < m; ++j) z += w[j] * x[j];
        st.h1[i] = z > 0.0 ? z : 0.0;
    }
    st.h2.assign(n2, 0.0);
    for (std::size_t i = 0; i < n2; ++i) {
        double z = net.biases[1][i];
        const double* w = net.weights[1].data() + i * n1;
        for (std::size_t j = 0; j < n1; ++j) z += w[j] * st.h1[j];
        st.h2[i] = z > 0.0 ? z : 0.0;
    }
    double z = net.biases[2][0];
    for (std::size_t j = 0; j < n2; ++j) z += net.weights[2][j] * st.h2[j];
    st.z3 = z;
    st.p = sigmoid(z);
}

NetworkGradients zero_gradients(const TrainedNetwork& net) {
    NetworkGradients g;
    g.weights.resize(net.weights.size());
    g.biases.resize(net.biases.size());
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        g.weights[l].assign(net.weights[l].size(), 0.0);
        g.biases[l].assign(net.biases[l].size(), 0.0);
    }
    return g;
}

}  // namespace

double bce_loss(int y, double p) {
    const double q = clamp_prob(p);
    return -(y * std::log(q) + (1 - y) * std::log(1.0 - q));
}

double csl_loss(int y, double p, std::optional<int> r, double alpha) {
    return sample_weight(y, r, alpha) * bce_loss(y, p);
}

double ctl_loss(std::span<const int> y, std::span<const double> p,
                std::span<const std::optional<int>> r, double alpha) {
    if (y.size() != p.size() || y.size() != r.size())
        throw NetworkError("ctl_loss inputs must have equal lengths");
    if (y.empty()) throw NetworkError("ctl_loss requires at least one sample");
    double total = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) total += csl_loss(y[i], p[i], r[i], alpha);
    return total / static_cast<double>(y.size());
}

double forward_scaled(const TrainedNetwork& net, std::span<const double> scaled_row) {
    if (scaled_row.size() != net.dims[0])
        throw DimensionMismatchError("input width " + std::to_string(scaled_row.size()) +
                                     " does not match network input " +
                                     std::to_string(net.dims[0]));
    ForwardState st;
    forward_into(net, scaled_row, st);
    return st.p;
}

NetworkGradients ctl_gradient(const TrainedNetwork& net,
                              std::span<const std::vector<double>> scaled_rows,
                              std::span<const int> y, std::span<const std::optional<int>> r,
                              double alpha, double* out_loss) {
    if (scaled_rows.size() != y.size() || y.size() != r.size())
        throw NetworkError("gradient inputs must have equal lengths");
    const auto& [m, n1, n2, n3] = net.dims;

    NetworkGradients g = zero_gradients(net);
    ForwardState st;
    std::vector<double> d1(n1), d2(n2);
    const double inv_n = 1.0 / static_cast<double>(scaled_rows.size());
    double loss = 0.0;

    for (std::size_t s = 0; s < scaled_rows.size(); ++s) {
        const std::vector<double>& x = scaled_rows[s];
        if (x.size() != m) throw DimensionMismatchError("row width does not match network input");
        forward_into(net, x, st);
        if (out_loss) loss += csl_loss(y[s], st.p, r[s], alpha) * inv_n;

        // d(BCE)/dz3 = p - y; the protocol weight scales the whole sample.
        const double scale = sample_weight(y[s], r[s], alpha) * inv_n;
        const double d3 = scale * (st.p - static_cast<double>(y[s]));

        for (std::size_t j = 0; j < n2; ++j) {
            g.weights[2][j] += d3 * st.h2[j];
            d2[j] = st.h2[j] > 0.0 ? d3 * net.weights[2][j] : 0.0;
        }
        g.biases[2][0] += d3;

        std::fill(d1.begin(), d1.end(), 0.0);
        for (std::size_t i = 0; i < n2; ++i) {
            if (d2[i] == 0.0) continue;
            const double* w = net.weights[1].data() + i * n1;
            double* gw = g.weights[1].data() + i * n1;
            for (std::size_t j = 0; j < n1; ++j) {
                gw[j] += d2[i] * st.h1[j];
                d1[j] += d2[i] * w[j];
            }
            g.biases[1][i] += d2[i];
        }
        for (std::size_t i = 0; i < n1; ++i) {
            if (st.h1[i] <= 0.0) d1[i] = 0.0;
        }
        for (std::size_t i = 0; i < n1; ++i) {
            if (d1[i] == 0.0) continue;
            double* gw = g.weights[0].data() + i * m;
            for (std::size_t j = 0; j < m; ++j) gw[j] += d1[i] * x[j];
            g.biases[0][i] += d1[i];
        }
    }
    if (out_loss) *out_loss = loss;
    return g;
}

TrainedNetwork init_network(std::size_t n_features, const NetworkConfig& config) {
    TrainedNetwork net;
    net.config = config;
    net.dims = {n_features, config.hidden_sizes[0], config.hidden_sizes[1], 1};

    std::mt19937_64 rng(config.seed);
    net.weights.resize(3);
    net.biases.resize(3);
    for (std::size_t l = 0; l < 3; ++l) {
        const std::size_t fan_in = net.dims[l];
        const std::size_t fan_out = net.dims[l + 1];
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        net.weights[l].resize(fan_in * fan_out);
        for (double& w : net.weights[l]) w = uniform_real(rng, -limit, limit);
        net.biases[l].assign(fan_out, 0.0);
    }
    return net;
}

TrainedNetwork train(const LabeledDataset& data, std::span<const std::size_t> train_indices,
                     std::span<const std::optional<int>> r, const NetworkConfig& config) {
    if (train_indices.empty()) throw NetworkError("training requires at least one sample");
    if (r.size() != data.n_rows())
        throw NetworkError("protocol vector must cover every dataset row");
    if (config.batch_size < 1 || config.epochs < 1)
        throw NetworkError("batch_size and epochs must be at least 1");

    auto [scaled, scaler] = standardize(data, train_indices);

    TrainedNetwork net = init_network(data.n_features(), config);
    net.scaler = scaler;

    // The init consumed draws from the seed stream; batch shuffling gets an
    // independent stream so layer-size changes do not ripple into it.
    std::mt19937_64 shuffle_rng(derive_seed(config.seed, 0x51u));

    std::vector<std::size_t> order(train_indices.begin(), train_indices.end());

    // Adam state (allocated only when used).
    NetworkGradients m1, m2;
    if (config.optimizer == Optimizer::adam) {
        m1 = zero_gradients(net);
        m2 = zero_gradients(net);
    }
    constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kAdamEps = 1e-8;
    std::size_t adam_step = 0;

    std::vector<std::vector<double>> batch_rows;
    std::vector<int> batch_y;
    std::vector<std::optional<int>> batch_r;

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle(order, shuffle_rng);
        double epoch_loss = 0.0;
        std::size_t n_batches = 0;

        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t end = std::min(start + config.batch_size, order.size());
            batch_rows.clear();
            batch_y.clear();
            batch_r.clear();
            for (std::size_t t = start; t < end; ++t) {
                const std::size_t i = order[t];
                batch_rows.push_back(scaled.rows[i]);
                batch_y.push_back(data.labels[i]);
                batch_r.push_back(r[i]);
            }

            double batch_loss = 0.0;
            const NetworkGradients g =
                ctl_gradient(net, batch_rows, batch_y, batch_r, config.alpha, &batch_loss);
            if (!std::isfinite(batch_loss)) {
                throw NonFiniteLossError("non-finite loss at epoch " + std::to_string(epoch) +
                                         ", batch " + std::to_string(n_batches) +
                                         " (alpha=" + std::to_string(config.alpha) + ")");
            }

            if (config.optimizer == Optimizer::sgd) {
                for (std::size_t l = 0; l < 3; ++l) {
                    for (std::size_t i = 0; i < net.weights[l].size(); ++i)
                        net.weights[l][i] -= config.learning_rate * g.weights[l][i];
                    for (std::size_t i = 0; i < net.biases[l].size(); ++i)
                        net.biases[l][i] -= config.learning_rate * g.biases[l][i];
                }
            } else {
                ++adam_step;
                const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(adam_step));
                const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(adam_step));
                const auto update = [&](std::vector<double>& param, std::vector<double>& mom1,
                                        std::vector<double>& mom2, const std::vector<double>& grad) {
                    for (std::size_t i = 0; i < param.size(); ++i) {
                        mom1[i] = kBeta1 * mom1[i] + (1.0 - kBeta1) * grad[i];
                        mom2[i] = kBeta2 * mom2[i] + (1.0 - kBeta2) * grad[i] * grad[i];
                        param[i] -= config.learning_rate * (mom1[i] / bc1) /
                                    (std::sqrt(mom2[i] / bc2) + kAdamEps);
                    }
                };
                for (std::size_t l = 0; l < 3; ++l) {
                    update(net.weights[l], m1.weights[l], m2.weights[l], g.weights[l]);
                    update(net.biases[l], m1.biases[l], m2.biases[l], g.biases[l]);
                }
            }

            epoch_loss += batch_loss;
            ++n_batches;
        }
        if (!std::isfinite(epoch_loss))
            throw NonFiniteLossError("non-finite epoch loss at epoch " + std::to_string(epoch));
    }
    return net;
}

std::vector<double> predict_proba(const TrainedNetwork& net,
                                  std::span<const std::vector<double>> rows) {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        if (row.size() != net.dims[0])
            throw DimensionMismatchError("row width does not match network input");
        const std::vector<double> scaled = net.scaler.apply(row);
        out.push_back(forward_scaled(net, scaled));
    }
    return out;
}

std::vector<double> predict_proba(const TrainedNetwork& net, const LabeledDataset& data,
                                  std::span<const std::size_t> indices) {
    std::vector<double> out;
    out.reserve(indices.size());
    for (std::size_t i : indices) {
        const std::vector<double> scaled = net.scaler.apply(data.rows[i]);
        out.push_back(forward_scaled(net, scaled));
    }
    return out;
}

std::vector<int> binarize(std::span<const double> p, double threshold) {
    std::vector<int> out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i] >= threshold ? 1 : 0;
    return out;
}

std::string TrainedNetwork::to_json_string() const {
    nlohmann::ordered_json j;
    j["dims"] = dims;
    j["weights"] = weights;
    j["biases"] = biases;
    j["scaler"] = {{"mean", scaler.mean}, {"stddev", scaler.stddev}};
    j["config"] = {{"hidden_sizes", config.hidden_sizes},
                   {"learning_rate", config.learning_rate},
                   {"batch_size", config.batch_size},
                   {"epochs", config.epochs},
                   {"seed", config.seed},
                   {"alpha", config.alpha},
                   {"optimizer", config.optimizer == Optimizer::adam ? "adam" : "sgd"}};
    return j.dump(2);
}

TrainedNetwork TrainedNetwork::from_json_string(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    TrainedNetwork net;
    j.at("dims").get_to(net.dims);
    j.at("weights").get_to(net.weights);
    j.at("biases").get_to(net.biases);
    j.at("scaler").at("mean").get_to(net.scaler.mean);
    j.at("scaler").at("stddev").get_to(net.scaler.stddev);
    const auto& cfg = j.at("config");
    cfg.at("hidden_sizes").get_to(net.config.hidden_sizes);
    cfg.at("learning_rate").get_to(net.config.learning_rate);
    cfg.at("batch_size").get_to(net.config.batch_size);
    cfg.at("epochs").get_to(net.config.epochs);
    cfg.at("seed").get_to(net.config.seed);
    cfg.at("alpha").get_to(net.config.alpha);
    net.config.optimizer =
        cfg.at("optimizer").get<std::string>() == "adam" ? Optimizer::adam : Optimizer::sgd;

    if (net.weights.size() != 3 || net.biases.size() != 3)
        throw NetworkError("checkpoint must contain exactly three layers");
    for (std::size_t l = 0; l < 3; ++l) {
        if (net.weights[l].size() != net.dims[l] * net.dims[l + 1] ||
            net.biases[l].size() != net.dims[l + 1])
            throw NetworkError("checkpoint layer shapes are inconsistent");
    }
    return net;
}

}  // namespace protoeval
