#include "wayplan/gcn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "wayplan/rng.hpp"

namespace wayplan {

namespace {

constexpr double kProbFloor = 1e-12;

// out[b] = s * h[b] for every n-row block of h.
Mat block_mul(const Mat& s, const Mat& h) {
    int n = s.rows();
    int batch = h.rows() / n;
    Mat out(h.rows(), h.cols());
    for (int b = 0; b < batch; ++b) {
        int base = b * n;
        for (int i = 0; i < n; ++i) {
            for (int k = 0; k < n; ++k) {
                double sik = s(i, k);
                if (sik == 0.0) continue;
                for (int c = 0; c < h.cols(); ++c)
                    out(base + i, c) += sik * h(base + k, c);
            }
        }
    }
    return out;
}

void softmax_rows(Mat& z) {
    for (int i = 0; i < z.rows(); ++i) {
        double mx = z(i, 0);
        for (int j = 1; j < z.cols(); ++j) mx = std::max(mx, z(i, j));
        double sum = 0.0;
        for (int j = 0; j < z.cols(); ++j) {
            double e = std::exp(z(i, j) - mx);
            z(i, j) = e;
            sum += e;
        }
        for (int j = 0; j < z.cols(); ++j) z(i, j) /= sum;
    }
}

} // namespace

NormalizedAdjacency normalize_adjacency(const Mat& a) {
    if (a.rows() != a.cols()) throw Error("normalize_adjacency: matrix must be square");
    int n = a.rows();
    Mat tilde = a;
    for (int i = 0; i < n; ++i) tilde(i, i) += 1.0;
    std::vector<double> dinv(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double deg = 0.0;
        for (int j = 0; j < n; ++j) {
            if (tilde(i, j) < 0.0) throw Error("normalize_adjacency: negative entry");
            deg += tilde(i, j);
        }
        dinv[static_cast<std::size_t>(i)] = 1.0 / std::sqrt(deg);
    }
    NormalizedAdjacency out;
    out.s = Mat(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out.s(i, j) = dinv[static_cast<std::size_t>(i)] * tilde(i, j) * dinv[static_cast<std::size_t>(j)];
    return out;
}

GcnModel init_model(const WeightedGraph& g, const std::vector<int>& hidden_widths, std::uint64_t seed) {
    if (hidden_widths.empty()) throw Error("init_model: need at least one hidden width");
    GcnModel m;
    m.fingerprint = g.fingerprint();
    m.n = g.node_count();
    m.widths.push_back(3);
    for (int w : hidden_widths) {
        if (w <= 0) throw Error("init_model: widths must be positive");
        m.widths.push_back(w);
    }
    Rng rng(seed);
    auto glorot = [&](Mat& w) {
        double a = std::sqrt(6.0 / (w.rows() + w.cols()));
        for (double& v : w.raw()) v = rng.next_range(-a, a);
    };
    for (std::size_t l = 0; l + 1 < m.widths.size(); ++l) {
        GcnLayer layer;
        layer.theta = Mat(m.widths[l], m.widths[l + 1]);
        glorot(layer.theta);
        auto d = static_cast<std::size_t>(m.widths[l + 1]);
        layer.gamma.assign(d, 1.0);
        layer.beta.assign(d, 0.0);
        layer.run_mean.assign(d, 0.0);
        layer.run_var.assign(d, 1.0);
        m.layers.push_back(std::move(layer));
    }
    int flat_dim = m.n * m.widths.back();
    m.dense_w = Mat(flat_dim, m.n);
    glorot(m.dense_w);
    m.dense_b.assign(static_cast<std::size_t>(m.n), 0.0);
    return m;
}

namespace {

Mat run_forward(const GcnModel& model, GcnModel* mutable_model, const NormalizedAdjacency& s,
                const Mat& x, bool train, const std::vector<char>* keep_mask, ForwardCache* cache) {
    int n = model.n;
    if (x.cols() != 3 || x.rows() % n != 0)
        throw Error("forward: input must stack n x 3 blocks");
    if (s.s.rows() != n) throw Error("forward: adjacency size mismatch");
    int batch = x.rows() / n;
    if (cache) {
        cache->batch = batch;
        cache->layers.assign(model.layers.size(), {});
    }

    Mat h = x;
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        const GcnLayer& layer = model.layers[l];
        Mat agg = block_mul(s.s, h);
        Mat z = matmul(agg, layer.theta);
        int d = z.cols();
        int rows = z.rows();
        std::vector<double> mean(static_cast<std::size_t>(d), 0.0), var(static_cast<std::size_t>(d), 0.0);
        if (train) {
            for (int c = 0; c < d; ++c) {
                double mu = 0.0;
                for (int r = 0; r < rows; ++r) mu += z(r, c);
                mu /= rows;
                double v2 = 0.0;
                for (int r = 0; r < rows; ++r) {
                    double t = z(r, c) - mu;
                    v2 += t * t;
                }
                v2 /= rows;
                mean[static_cast<std::size_t>(c)] = mu;
                var[static_cast<std::size_t>(c)] = v2;
            }
            GcnLayer& ml = mutable_model->layers[l];
            for (int c = 0; c < d; ++c) {
                auto uc = static_cast<std::size_t>(c);
                ml.run_mean[uc] = model.bn_decay * ml.run_mean[uc] + (1.0 - model.bn_decay) * mean[uc];
                ml.run_var[uc] = model.bn_decay * ml.run_var[uc] + (1.0 - model.bn_decay) * var[uc];
            }
        } else {
            for (int c = 0; c < d; ++c) {
                mean[static_cast<std::size_t>(c)] = layer.run_mean[static_cast<std::size_t>(c)];
                var[static_cast<std::size_t>(c)] = layer.run_var[static_cast<std::size_t>(c)];
            }
        }
        Mat xhat(rows, d), hout(rows, d);
        for (int c = 0; c < d; ++c) {
            auto uc = static_cast<std::size_t>(c);
            double inv = 1.0 / std::sqrt(var[uc] + model.bn_eps);
            double ga = layer.gamma[uc], be = layer.beta[uc];
            for (int r = 0; r < rows; ++r) {
                double xh = (z(r, c) - mean[uc]) * inv;
                xhat(r, c) = xh;
                hout(r, c) = std::max(0.0, ga * xh + be);
            }
        }
        if (cache) {
            LayerCache& lc = cache->layers[l];
            lc.h_in = std::move(h);
            lc.agg = std::move(agg);
            lc.z = std::move(z);
            lc.mean = std::move(mean);
            lc.var = std::move(var);
            lc.xhat = xhat;
            lc.h_out = hout;
        }
        h = std::move(hout);
    }

    // Flatten each example's n x d_L block row-major.
    int dl = model.widths.back();
    int flat_dim = n * dl;
    Mat flat(batch, flat_dim);
    for (int b = 0; b < batch; ++b)
        for (int j = 0; j < n; ++j)
            for (int c = 0; c < dl; ++c) flat(b, j * dl + c) = h(b * n + j, c);

    Mat dropped = flat;
    if (train) {
        if (!keep_mask || keep_mask->size() != flat.size())
            throw Error("forward: dropout mask size mismatch");
        double inv_keep = 1.0 / (1.0 - model.dropout_rate);
        for (std::size_t i = 0; i < flat.size(); ++i)
            dropped.raw()[i] = (*keep_mask)[i] ? flat.raw()[i] * inv_keep : 0.0;
    }

    Mat logits = matmul(dropped, model.dense_w);
    for (int b = 0; b < batch; ++b)
        for (int j = 0; j < model.n; ++j) logits(b, j) += model.dense_b[static_cast<std::size_t>(j)];
    softmax_rows(logits);

    if (cache) {
        cache->flat = std::move(flat);
        cache->flat_dropped = std::move(dropped);
        if (keep_mask) cache->keep = *keep_mask;
        cache->yhat = logits;
    }
    return logits;
}

} // namespace

Mat forward_train(GcnModel& m, const NormalizedAdjacency& s, const Mat& x,
                  const std::vector<char>& keep_mask, ForwardCache& cache) {
    return run_forward(m, &m, s, x, true, &keep_mask, &cache);
}

Mat forward_infer(const GcnModel& m, const NormalizedAdjacency& s, const Mat& x) {
    return run_forward(m, nullptr, s, x, false, nullptr, nullptr);
}

std::vector<double> forward(const GcnModel& m, const NormalizedAdjacency& s, const std::vector<double>& x) {
    if (static_cast<int>(x.size()) != 3 * m.n) throw Error("forward: encoding must have 3n entries");
    Mat xm(m.n, 3);
    for (int j = 0; j < m.n; ++j)
        for (int c = 0; c < 3; ++c) xm(j, c) = x[static_cast<std::size_t>(3 * j + c)];
    Mat y = forward_infer(m, s, xm);
    return y.raw();
}

double cross_entropy(const Mat& yhat, const std::vector<NodeId>& labels) {
    if (static_cast<std::size_t>(yhat.rows()) != labels.size())
        throw Error("cross_entropy: batch size mismatch");
    double total = 0.0;
    for (int i = 0; i < yhat.rows(); ++i) {
        double p = std::max(yhat(i, labels[static_cast<std::size_t>(i)]), kProbFloor);
        total += -std::log(p);
    }
    return total / yhat.rows();
}

double accuracy(const Mat& yhat, const std::vector<NodeId>& labels) {
    int hits = 0;
    for (int i = 0; i < yhat.rows(); ++i) {
        int arg = 0;
        for (int j = 1; j < yhat.cols(); ++j)
            if (yhat(i, j) > yhat(i, arg)) arg = j;
        if (arg == labels[static_cast<std::size_t>(i)]) ++hits;
    }
    return yhat.rows() ? static_cast<double>(hits) / yhat.rows() : 0.0;
}

Gradients backward(const GcnModel& m, const NormalizedAdjacency& s, const ForwardCache& cache,
                   const std::vector<NodeId>& labels) {
    int batch = cache.batch;
    if (static_cast<std::size_t>(batch) != labels.size()) throw Error("backward: batch size mismatch");
    int n = m.n;
    int dl = m.widths.back();

    Gradients g;
    g.dtheta.resize(m.layers.size());
    g.dgamma.resize(m.layers.size());
    g.dbeta.resize(m.layers.size());

    // Softmax + cross-entropy head.
    Mat dz(batch, n);
    for (int b = 0; b < batch; ++b) {
        for (int j = 0; j < n; ++j) dz(b, j) = cache.yhat(b, j) / batch;
        dz(b, labels[static_cast<std::size_t>(b)]) -= 1.0 / batch;
    }

    g.ddense_w = matmul_tn(cache.flat_dropped, dz);
    g.ddense_b.assign(static_cast<std::size_t>(n), 0.0);
    for (int b = 0; b < batch; ++b)
        for (int j = 0; j < n; ++j) g.ddense_b[static_cast<std::size_t>(j)] += dz(b, j);

    Mat dflat = matmul_nt(dz, m.dense_w); // batch x (n*dl)
    double inv_keep = 1.0 / (1.0 - m.dropout_rate);
    for (std::size_t i = 0; i < dflat.size(); ++i)
        dflat.raw()[i] = cache.keep[i] ? dflat.raw()[i] * inv_keep : 0.0;

    // Unflatten to (batch*n) x dl.
    Mat dh(batch * n, dl);
    for (int b = 0; b < batch; ++b)
        for (int j = 0; j < n; ++j)
            for (int c = 0; c < dl; ++c) dh(b * n + j, c) = dflat(b, j * dl + c);

    Mat st = transpose(s.s);
    for (int l = static_cast<int>(m.layers.size()) - 1; l >= 0; --l) {
        const GcnLayer& layer = m.layers[static_cast<std::size_t>(l)];
        const LayerCache& lc = cache.layers[static_cast<std::size_t>(l)];
        int rows = lc.z.rows();
        int d = lc.z.cols();

        // ReLU.
        Mat dbn(rows, d);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < d; ++c) dbn(r, c) = lc.h_out(r, c) > 0.0 ? dh(r, c) : 0.0;

        // Batch norm over all rows, per channel.
        auto& dgamma = g.dgamma[static_cast<std::size_t>(l)];
        auto& dbeta = g.dbeta[static_cast<std::size_t>(l)];
        dgamma.assign(static_cast<std::size_t>(d), 0.0);
        dbeta.assign(static_cast<std::size_t>(d), 0.0);
        Mat dzc(rows, d);
        for (int c = 0; c < d; ++c) {
            auto uc = static_cast<std::size_t>(c);
            double inv = 1.0 / std::sqrt(lc.var[uc] + m.bn_eps);
            double sum_dxhat = 0.0, sum_dxhat_xhat = 0.0, dg = 0.0, db = 0.0;
            for (int r = 0; r < rows; ++r) {
                double dout = dbn(r, c);
                dg += dout * lc.xhat(r, c);
                db += dout;
                double dxhat = dout * layer.gamma[uc];
                sum_dxhat += dxhat;
                sum_dxhat_xhat += dxhat * lc.xhat(r, c);
            }
            dgamma[uc] = dg;
            dbeta[uc] = db;
            for (int r = 0; r < rows; ++r) {
                double dxhat = dbn(r, c) * layer.gamma[uc];
                dzc(r, c) = inv / rows * (rows * dxhat - sum_dxhat - lc.xhat(r, c) * sum_dxhat_xhat);
            }
        }

        g.dtheta[static_cast<std::size_t>(l)] = matmul_tn(lc.agg, dzc);
        if (l > 0) {
            Mat dagg = matmul_nt(dzc, layer.theta);
            dh = block_mul(st, dagg);
        }
    }
    return g;
}

namespace {

void collect_spans(GcnModel& m, std::vector<std::pair<double*, std::size_t>>& spans) {
    for (GcnLayer& l : m.layers) {
        spans.emplace_back(l.theta.data(), l.theta.size());
        spans.emplace_back(l.gamma.data(), l.gamma.size());
        spans.emplace_back(l.beta.data(), l.beta.size());
    }
    spans.emplace_back(m.dense_w.data(), m.dense_w.size());
    spans.emplace_back(m.dense_b.data(), m.dense_b.size());
}

void collect_grad_spans(const Gradients& g, std::vector<std::pair<const double*, std::size_t>>& spans) {
    for (std::size_t l = 0; l < g.dtheta.size(); ++l) {
        spans.emplace_back(g.dtheta[l].data(), g.dtheta[l].size());
        spans.emplace_back(g.dgamma[l].data(), g.dgamma[l].size());
        spans.emplace_back(g.dbeta[l].data(), g.dbeta[l].size());
    }
    spans.emplace_back(g.ddense_w.data(), g.ddense_w.size());
    spans.emplace_back(g.ddense_b.data(), g.ddense_b.size());
}

} // namespace

void adam_step(GcnModel& model, const Gradients& g, AdamState& st, double lr) {
    std::vector<std::pair<double*, std::size_t>> params;
    std::vector<std::pair<const double*, std::size_t>> grads;
    collect_spans(model, params);
    collect_grad_spans(g, grads);
    if (params.size() != grads.size()) throw Error("adam_step: gradient/parameter mismatch");
    if (st.m.empty()) {
        st.m.resize(params.size());
        st.v.resize(params.size());
        for (std::size_t i = 0; i < params.size(); ++i) {
            st.m[i].assign(params[i].second, 0.0);
            st.v[i].assign(params[i].second, 0.0);
        }
    }
    ++st.t;
    double bc1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.t));
    double bc2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto [p, len] = params[i];
        auto [gr, glen] = grads[i];
        if (len != glen) throw Error("adam_step: tensor shape mismatch");
        for (std::size_t k = 0; k < len; ++k) {
            double grad = gr[k];
            st.m[i][k] = st.beta1 * st.m[i][k] + (1.0 - st.beta1) * grad;
            st.v[i][k] = st.beta2 * st.v[i][k] + (1.0 - st.beta2) * grad * grad;
            double mhat = st.m[i][k] / bc1;
            double vhat = st.v[i][k] / bc2;
            p[k] -= lr * mhat / (std::sqrt(vhat) + st.eps);
        }
    }
}

namespace {

Mat stack_examples(const Dataset& ds, const std::vector<std::size_t>& idx, int n,
                   std::vector<NodeId>& labels) {
    Mat x(static_cast<int>(idx.size()) * n, 3);
    labels.clear();
    labels.reserve(idx.size());
    for (std::size_t b = 0; b < idx.size(); ++b) {
        const Example& ex = ds.examples[idx[b]];
        for (int j = 0; j < n; ++j)
            for (int c = 0; c < 3; ++c)
                x(static_cast<int>(b) * n + j, c) = ex.x[static_cast<std::size_t>(3 * j + c)];
        labels.push_back(ex.label);
    }
    return x;
}

} // namespace

TrainResult train(const GcnModel& init, const NormalizedAdjacency& s, const Dataset& ds,
                  const TrainConfig& cfg) {
    if (ds.examples.empty()) throw Error("train: empty dataset");
    if (ds.fingerprint != init.fingerprint) throw Error("train: dataset/model fingerprint mismatch");
    if (ds.n != init.n) throw Error("train: dataset/model node count mismatch");

    GcnModel model = init;
    model.bn_decay = cfg.bn_decay;
    AdamState adam;
    Rng rng(cfg.seed);

    std::vector<std::size_t> train_idx(ds.train_count);
    for (std::size_t i = 0; i < ds.train_count; ++i) train_idx[i] = i;
    std::vector<std::size_t> test_idx(ds.test_count());
    for (std::size_t i = 0; i < test_idx.size(); ++i) test_idx[i] = ds.train_count + i;

    std::vector<NodeId> test_labels;
    Mat test_x;
    if (!test_idx.empty()) test_x = stack_examples(ds, test_idx, model.n, test_labels);

    TrainResult res;
    double best_loss = kInfCost;
    int since_best = 0;

    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        rng.shuffle(train_idx);
        double epoch_loss = 0.0, epoch_acc = 0.0;
        std::size_t batches = 0;
        for (std::size_t off = 0; off < train_idx.size(); off += static_cast<std::size_t>(cfg.batch_size)) {
            std::size_t end = std::min(train_idx.size(), off + static_cast<std::size_t>(cfg.batch_size));
            std::vector<std::size_t> batch_idx(train_idx.begin() + static_cast<std::ptrdiff_t>(off),
                                               train_idx.begin() + static_cast<std::ptrdiff_t>(end));
            std::vector<NodeId> labels;
            Mat x = stack_examples(ds, batch_idx, model.n, labels);
            std::vector<char> keep(static_cast<std::size_t>(batch_idx.size()) *
                                   static_cast<std::size_t>(model.n * model.widths.back()));
            for (auto& k : keep) k = rng.next_unit() >= model.dropout_rate ? 1 : 0;
            ForwardCache cache;
            Mat yhat = forward_train(model, s, x, keep, cache);
            epoch_loss += cross_entropy(yhat, labels);
            epoch_acc += accuracy(yhat, labels);
            Gradients g = backward(model, s, cache, labels);
            adam_step(model, g, adam, cfg.lr);
            ++batches;
        }
        EpochStats es;
        es.epoch = epoch;
        es.train_loss = batches ? epoch_loss / static_cast<double>(batches) : 0.0;
        es.train_acc = batches ? epoch_acc / static_cast<double>(batches) : 0.0;
        if (!test_idx.empty()) {
            Mat ty = forward_infer(model, s, test_x);
            es.test_loss = cross_entropy(ty, test_labels);
            es.test_acc = accuracy(ty, test_labels);
        } else {
            // No held-out data; fall back to the train metrics for stopping.
            es.test_loss = es.train_loss;
            es.test_acc = es.train_acc;
        }
        res.curves.push_back(es);

        if (es.test_loss < best_loss) {
            best_loss = es.test_loss;
            res.best = model;
            res.best_epoch = epoch;
            res.best_test_loss = es.test_loss;
            res.best_test_acc = es.test_acc;
            since_best = 0;
        } else if (++since_best >= cfg.patience) {
            break;
        }
    }
    if (res.best_epoch < 0) {
        res.best = model;
        res.best_epoch = 0;
    }
    return res;
}

namespace {

void write_tensor(std::ostream& out, const std::string& name, const double* p, std::size_t len) {
    out << "tensor " << name << ' ' << len << '\n';
    out << std::hexfloat;
    for (std::size_t i = 0; i < len; ++i) out << p[i] << (i + 1 == len ? '\n' : ' ');
    if (len == 0) out << '\n';
    out << std::defaultfloat;
}

void read_tensor(std::istream& in, const std::string& want, double* p, std::size_t len) {
    std::string tag, name;
    std::size_t got = 0;
    if (!(in >> tag >> name >> got) || tag != "tensor" || name != want || got != len)
        throw Error("model file: bad tensor header (expected " + want + ")");
    for (std::size_t i = 0; i < len; ++i) {
        std::string tok;
        if (!(in >> tok)) throw Error("model file: truncated tensor " + want);
        char* end = nullptr;
        p[i] = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str()) throw Error("model file: bad value in tensor " + want);
    }
}

} // namespace

std::string serialize_model(const GcnModel& m) {
    std::ostringstream out;
    out << "gcnmodel v1\n";
    out << "fingerprint " << std::hex << m.fingerprint << std::dec << '\n';
    out << "nodes " << m.n << '\n';
    out << "widths " << m.widths.size();
    for (int w : m.widths) out << ' ' << w;
    out << '\n';
    out << "dropout " << std::hexfloat << m.dropout_rate << std::defaultfloat << '\n';
    out << "bn " << std::hexfloat << m.bn_decay << ' ' << m.bn_eps << std::defaultfloat << '\n';
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
        const GcnLayer& layer = m.layers[l];
        std::string base = "layer" + std::to_string(l) + ".";
        write_tensor(out, base + "theta", layer.theta.data(), layer.theta.size());
        write_tensor(out, base + "gamma", layer.gamma.data(), layer.gamma.size());
        write_tensor(out, base + "beta", layer.beta.data(), layer.beta.size());
        write_tensor(out, base + "run_mean", layer.run_mean.data(), layer.run_mean.size());
        write_tensor(out, base + "run_var", layer.run_var.data(), layer.run_var.size());
    }
    write_tensor(out, "dense.w", m.dense_w.data(), m.dense_w.size());
    write_tensor(out, "dense.b", m.dense_b.data(), m.dense_b.size());
    out << "end\n";
    return out.str();
}

GcnModel parse_model(std::istream& in) {
    GcnModel m;
    std::string tag, version;
    if (!(in >> tag >> version) || tag != "gcnmodel" || version != "v1")
        throw Error("model file: bad header");
    if (!(in >> tag >> std::hex >> m.fingerprint >> std::dec) || tag != "fingerprint")
        throw Error("model file: missing fingerprint");
    if (!(in >> tag >> m.n) || tag != "nodes" || m.n < 1) throw Error("model file: bad node count");
    std::size_t nw = 0;
    if (!(in >> tag >> nw) || tag != "widths" || nw < 2) throw Error("model file: bad widths");
    m.widths.resize(nw);
    for (int& w : m.widths)
        if (!(in >> w) || w <= 0) throw Error("model file: bad width");
    std::string tok;
    if (!(in >> tag >> tok) || tag != "dropout") throw Error("model file: missing dropout");
    m.dropout_rate = std::strtod(tok.c_str(), nullptr);
    std::string tok2;
    if (!(in >> tag >> tok >> tok2) || tag != "bn") throw Error("model file: missing bn params");
    m.bn_decay = std::strtod(tok.c_str(), nullptr);
    m.bn_eps = std::strtod(tok2.c_str(), nullptr);

    for (std::size_t l = 0; l + 1 < m.widths.size(); ++l) {
        GcnLayer layer;
        auto din = static_cast<std::size_t>(m.widths[l]);
        auto dout = static_cast<std::size_t>(m.widths[l + 1]);
        layer.theta = Mat(static_cast<int>(din), static_cast<int>(dout));
        layer.gamma.resize(dout);
        layer.beta.resize(dout);
        layer.run_mean.resize(dout);
        layer.run_var.resize(dout);
        std::string base = "layer" + std::to_string(l) + ".";
        read_tensor(in, base + "theta", layer.theta.data(), layer.theta.size());
        read_tensor(in, base + "gamma", layer.gamma.data(), dout);
        read_tensor(in, base + "beta", layer.beta.data(), dout);
        read_tensor(in, base + "run_mean", layer.run_mean.data(), dout);
        read_tensor(in, base + "run_var", layer.run_var.data(), dout);
        m.layers.push_back(std::move(layer));
    }
    auto flat = static_cast<std::size_t>(m.n) * static_cast<std::size_t>(m.widths.back());
    m.dense_w = Mat(static_cast<int>(flat), m.n);
    m.dense_b.resize(static_cast<std::size_t>(m.n));
    read_tensor(in, "dense.w", m.dense_w.data(), m.dense_w.size());
    read_tensor(in, "dense.b", m.dense_b.data(), m.dense_b.size());
    if (!(in >> tag) || tag != "end") throw Error("model file: missing end marker");
    return m;
}

void save_model(const GcnModel& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write model file: " + path);
    out << serialize_model(m);
}

GcnModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open model file: " + path);
    return parse_model(in);
}

void write_curves_csv(const std::vector<EpochStats>& curves, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write curves file: " + path);
    out << "epoch,train_loss,test_loss,train_acc,test_acc\n";
    char buf[256];
    for (const EpochStats& e : curves) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g\n", e.epoch, e.train_loss,
                      e.test_loss, e.train_acc, e.test_acc);
        out << buf;
    }
}

} // namespace wayplan
