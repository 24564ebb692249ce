#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "protoeval/dataset.hpp"

namespace protoeval {

struct NetworkError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonFiniteLossError : NetworkError {
    using NetworkError::NetworkError;
};

struct DimensionMismatchError : NetworkError {
    using NetworkError::NetworkError;
};

// Clamp applied inside the cross-entropy logs.
inline constexpr double kProbEpsilon = 1e-7;

enum class Optimizer { sgd, adam };

struct NetworkConfig {
    std::array<std::size_t, 2> hidden_sizes{16, 8};
    double learning_rate = 0.05;
    std::size_t batch_size = 20;
    std::size_t epochs = 25;
    std::uint64_t seed = 0;
    double alpha = 0.0;  // knowledge weight; 0 disables the protocol term
    Optimizer optimizer = Optimizer::sgd;
};

// Three dense layers (ReLU, ReLU, sigmoid). Weights are row-major
// (output x input). The scaler reproduces the training-time feature
// standardization, so predictions take raw feature rows.
struct TrainedNetwork {
    std::array<std::size_t, 4> dims{};          // input, hidden1, hidden2, 1
    std::vector<std::vector<double>> weights;   // 3 layers
    std::vector<std::vector<double>> biases;
    ScalerParams scaler;
    NetworkConfig config;

    std::string to_json_string() const;
    static TrainedNetwork from_json_string(const std::string& text);
};

// Binary cross-entropy of one sample; p is clamped away from {0, 1}.
double bce_loss(int y, double p);

// Protocol-weighted per-sample loss: (alpha + 1) * L when the protocol got
// the sample right, plain L otherwise (including N/A).
double csl_loss(int y, double p, std::optional<int> r, double alpha);

// Mean CSL over a batch.
double ctl_loss(std::span<const int> y, std::span<const double> p,
                std::span<const std::optional<int>> r, double alpha);

// Gradients of the mean CSL with the same layout as the network parameters.
struct NetworkGradients {
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;
};

// Forward pass on already-scaled input.
double forward_scaled(const TrainedNetwork& net, std::span<const double> scaled_row);

// Analytic gradient of the mean CSL over the given scaled rows. When
// out_loss is non-null it receives the mean CSL at the current weights.
NetworkGradients ctl_gradient(const TrainedNetwork& net,
                              std::span<const std::vector<double>> scaled_rows,
                              std::span<const int> y, std::span<const std::optional<int>> r,
                              double alpha, double* out_loss = nullptr);

// Fresh network with seeded Xavier-uniform weights and zero biases.
TrainedNetwork init_network(std::size_t n_features, const NetworkConfig& config);

// Mini-batch gradient descent on the custom total loss. Standardizes features
// internally from the training rows; r is indexed like data.rows.
TrainedNetwork train(const LabeledDataset& data, std::span<const std::size_t> train_indices,
                     std::span<const std::optional<int>> r, const NetworkConfig& config);

// Probability of the positive class for raw (unscaled) feature rows.
std::vector<double> predict_proba(const TrainedNetwork& net,
                                  std::span<const std::vector<double>> rows);
std::vector<double> predict_proba(const TrainedNetwork& net, const LabeledDataset& data,
                                  std::span<const std::size_t> indices);

std::vector<int> binarize(std::span<const double> p, double threshold = 0.5);

}  // namespace protoeval
