#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wayplan/dataset.hpp"
#include "wayplan/graph.hpp"
#include "wayplan/mat.hpp"

namespace wayplan {

// Symmetrically normalized adjacency D^{-1/2} (A + I) D^{-1/2} with weighted
// degrees; the propagation operator of every graph convolution.
struct NormalizedAdjacency {
    Mat s;
};

NormalizedAdjacency normalize_adjacency(const Mat& a);

// One graph convolution: h -> relu(batchnorm(S h theta)). Batch statistics
// are taken jointly over the batch and node dimensions, per channel.
struct GcnLayer {
    Mat theta; // d_in x d_out
    std::vector<double> gamma, beta;       // learned scale/shift
    std::vector<double> run_mean, run_var; // frozen at inference
};

struct GcnModel {
    std::uint64_t fingerprint = 0; // graph this model was built for
    int n = 0;
    std::vector<int> widths; // {3, hidden..., d_L}
    std::vector<GcnLayer> layers;
    Mat dense_w; // (n * d_L) x n
    std::vector<double> dense_b;
    double dropout_rate = 0.1;
    double bn_decay = 0.9;
    double bn_eps = 1e-5;
};

inline const std::vector<int>& default_hidden_widths() {
    static const std::vector<int> w{32, 32, 32};
    return w;
}

// Glorot-uniform initialization, seeded.
GcnModel init_model(const WeightedGraph& g, const std::vector<int>& hidden_widths, std::uint64_t seed);

struct LayerCache {
    Mat h_in, agg, z, xhat, h_out;
    std::vector<double> mean, var;
};

struct ForwardCache {
    int batch = 0;
    std::vector<LayerCache> layers;
    Mat flat;              // B x (n*d_L), before dropout
    std::vector<char> keep; // dropout keep mask over flat entries
    Mat flat_dropped;
    Mat yhat; // B x n, softmax rows
};

// Batched training-mode forward: batch statistics, running-stat update,
// inverted dropout with the given keep mask. X stacks one n x 3 block per
// example. Returns softmax probabilities, one row per example.
Mat forward_train(GcnModel& m, const NormalizedAdjacency& s, const Mat& x,
                  const std::vector<char>& keep_mask, ForwardCache& cache);

// Inference-mode forward: no dropout, frozen statistics. Pure.
Mat forward_infer(const GcnModel& m, const NormalizedAdjacency& s, const Mat& x);

// Single-instance inference convenience over the 3n encoding.
std::vector<double> forward(const GcnModel& m, const NormalizedAdjacency& s, const std::vector<double>& x);

// Mean cross-entropy of one-hot labels; probabilities clamped at 1e-12.
double cross_entropy(const Mat& yhat, const std::vector<NodeId>& labels);

// Fraction of rows whose argmax (ties to the lowest node id) matches.
double accuracy(const Mat& yhat, const std::vector<NodeId>& labels);

struct Gradients {
    std::vector<Mat> dtheta;
    std::vector<std::vector<double>> dgamma, dbeta;
    Mat ddense_w;
    std::vector<double> ddense_b;
};

// Exact gradients of the batch cross-entropy w.r.t. every parameter, from
// the cached training-mode forward.
Gradients backward(const GcnModel& m, const NormalizedAdjacency& s, const ForwardCache& cache,
                   const std::vector<NodeId>& labels);

struct AdamState {
    std::vector<std::vector<double>> m, v;
    std::int64_t t = 0;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
};

void adam_step(GcnModel& model, const Gradients& g, AdamState& st, double lr);

struct TrainConfig {
    double lr = 1e-4;
    int batch_size = 32;
    double bn_decay = 0.9;
    int max_epochs = 1500;
    int patience = 80; // epochs without test-loss improvement
    std::uint64_t seed = 1;
};

struct EpochStats {
    int epoch = 0;
    double train_loss = 0, test_loss = 0, train_acc = 0, test_acc = 0;
};

struct TrainResult {
    GcnModel best; // snapshot at minimal test loss
    std::vector<EpochStats> curves;
    int best_epoch = -1;
    double best_test_loss = 0;
    double best_test_acc = 0;
};

// Mini-batch Adam with early stopping on the test loss; returns the best
// snapshot. Train metrics are averaged over the epoch's training batches.
TrainResult train(const GcnModel& init, const NormalizedAdjacency& s, const Dataset& ds,
                  const TrainConfig& cfg);

std::string serialize_model(const GcnModel& m);
GcnModel parse_model(std::istream& in);
void save_model(const GcnModel& m, const std::string& path);
GcnModel load_model(const std::string& path);

void write_curves_csv(const std::vector<EpochStats>& curves, const std::string& path);

} // namespace wayplan
