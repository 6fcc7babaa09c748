// src/scl.cpp

#include "intentforge/scl.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>

#include <json.hpp>

#include "intentforge/error.hpp"
#include "intentforge/jsonio.hpp"

namespace intentforge {

using nlohmann::json;

AdapterParams identity_adapter(size_t dim, double tau, bool normalize) {
  AdapterParams p;
  p.in_dim = dim;
  p.out_dim = dim;
  p.W.assign(dim * dim, 0.0);
  for (size_t i = 0; i < dim; ++i) p.W[i * dim + i] = 1.0;
  p.tau = tau;
  p.normalize_output = normalize;
  return p;
}

Vector apply_adapter(const AdapterParams& params, const Vector& x) {
  if (x.size() != params.in_dim)
    throw ValidationError("apply_adapter: input has dim " + std::to_string(x.size()) +
                          ", adapter expects " + std::to_string(params.in_dim));
  Vector y(params.out_dim, 0.0);
  for (size_t r = 0; r < params.out_dim; ++r) {
    const double* wrow = params.W.data() + r * params.in_dim;
    double acc = 0.0;
    for (size_t c = 0; c < params.in_dim; ++c) acc += wrow[c] * x[c];
    y[r] = acc;
  }
  if (!params.b.empty())
    for (size_t r = 0; r < params.out_dim; ++r) y[r] += params.b[r];
  if (params.normalize_output) l2_normalize(y);
  return y;
}

EmbeddingMatrix apply_adapter_all(const AdapterParams& params, const EmbeddingMatrix& X) {
  if (X.dim != params.in_dim)
    throw ValidationError("apply_adapter_all: matrix dim " + std::to_string(X.dim) +
                          " does not match adapter input dim " + std::to_string(params.in_dim));
  EmbeddingMatrix Y(X.n, params.out_dim);
  const int64_t n = static_cast<int64_t>(X.n);
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < n; ++i) {
    Vector x(X.row(i).begin(), X.row(i).end());
    Vector y = apply_adapter(params, x);
    std::copy(y.begin(), y.end(), Y.row(i).begin());
  }
  return Y;
}

void save_adapter(const AdapterParams& params, const std::string& path) {
  json doc;
  doc["in_dim"] = params.in_dim;
  doc["out_dim"] = params.out_dim;
  doc["W"] = params.W;
  if (params.b.empty())
    doc["b"] = nullptr;
  else
    doc["b"] = params.b;
  doc["tau"] = params.tau;
  doc["normalize"] = params.normalize_output;
  write_file(path, doc.dump());
}

AdapterParams load_adapter(const std::string& path) {
  json doc = json::parse(read_file(path), nullptr, false);
  if (doc.is_discarded() || !doc.is_object())
    throw ValidationError("adapter file is not valid JSON: " + path);
  AdapterParams p;
  try {
    p.in_dim = doc.at("in_dim").get<size_t>();
    p.out_dim = doc.at("out_dim").get<size_t>();
    p.W = doc.at("W").get<std::vector<double>>();
    if (!doc.at("b").is_null()) p.b = doc.at("b").get<std::vector<double>>();
    p.tau = doc.at("tau").get<double>();
    p.normalize_output = doc.at("normalize").get<bool>();
  } catch (const json::exception& e) {
    throw ValidationError("adapter file " + path + ": " + e.what());
  }
  if (p.W.size() != p.in_dim * p.out_dim || (!p.b.empty() && p.b.size() != p.out_dim))
    throw ValidationError("adapter file " + path + ": inconsistent shapes");
  if (!(p.tau > 0.0)) throw ValidationError("adapter file " + path + ": tau must be positive");
  for (double w : p.W)
    if (!std::isfinite(w))
      throw ValidationError("adapter file " + path + ": non-finite weight");
  for (double b : p.b)
    if (!std::isfinite(b))
      throw ValidationError("adapter file " + path + ": non-finite bias");
  return p;
}

SynonymLexicon load_synonym_lexicon(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open synonym lexicon: " + path);
  SynonymLexicon lex;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size())
      throw ValidationError("synonym lexicon line " + std::to_string(line_no) +
                            ": expected \"word<TAB>synonym\"");
    std::string word = fold_case(line.substr(0, tab));
    std::string syn = fold_case(line.substr(tab + 1));
    auto& list = lex.synonyms[word];
    if (std::find(list.begin(), list.end(), syn) == list.end()) list.push_back(syn);
  }
  return lex;
}

VerbObject augment_synonym(const VerbObject& pair, const SynonymLexicon& lexicon, Rng& rng) {
  bool pick_object = rng.uniform() < 0.5;
  const std::string& word = pick_object ? pair.object : pair.verb;
  auto it = lexicon.synonyms.find(word);
  if (it == lexicon.synonyms.end() || it->second.empty()) return pair;
  const std::string& syn = it->second[rng.uniform_below(it->second.size())];
  VerbObject out = pair;
  (pick_object ? out.object : out.verb) = syn;
  return out;
}

namespace {

void check_batch(const std::vector<Vector>& phi, const std::vector<int>& labels, double tau) {
  if (phi.size() != labels.size())
    throw ValidationError("scl: vectors and labels differ in length");
  if (phi.size() < 2) throw ValidationError("scl: batch must have at least 2 items");
  if (!(tau > 0.0)) throw ValidationError("scl: tau must be positive");
  std::map<int, int> freq;
  for (int y : labels) ++freq[y];
  for (const auto& [label, count] : freq)
    if (count < 2)
      throw ValidationError("scl: label " + std::to_string(label) +
                            " has a single batch member");
}

// z[i][j] = phi_i . phi_j / tau, diagonal unused.
std::vector<std::vector<double>> similarity_logits(const std::vector<Vector>& phi, double tau) {
  const int64_t n = static_cast<int64_t>(phi.size());
  std::vector<std::vector<double>> z(n, std::vector<double>(n, 0.0));
#pragma omp parallel for schedule(static) if (n > 16)
  for (int64_t i = 0; i < n; ++i)
    for (int64_t j = 0; j < n; ++j) {
      if (i == j) continue;
      double dot = 0.0;
      for (size_t d = 0; d < phi[i].size(); ++d) dot += phi[i][d] * phi[j][d];
      z[i][j] = dot / tau;
    }
  return z;
}

}  // namespace

double scl_loss(const std::vector<Vector>& phi, const std::vector<int>& labels, double tau) {
  check_batch(phi, labels, tau);
  const size_t n = phi.size();
  auto z = similarity_logits(phi, tau);

  double loss = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double zmax = -std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < n; ++k)
      if (k != i) zmax = std::max(zmax, z[i][k]);
    double denom = 0.0;
    for (size_t k = 0; k < n; ++k)
      if (k != i) denom += std::exp(z[i][k] - zmax);
    double log_denom = zmax + std::log(denom);

    double pos_sum = 0.0;
    int pos_count = 0;
    for (size_t j = 0; j < n; ++j) {
      if (j == i || labels[j] != labels[i]) continue;
      pos_sum += z[i][j];
      ++pos_count;
    }
    loss += log_denom - pos_sum / pos_count;
  }
  return loss;
}

std::vector<Vector> scl_grad(const std::vector<Vector>& phi, const std::vector<int>& labels,
                             double tau) {
  check_batch(phi, labels, tau);
  const size_t n = phi.size();
  const size_t dim = phi[0].size();
  auto z = similarity_logits(phi, tau);

  // g[i][j] = dL_i/dz_ij = softmax_i(j) - [j positive]/|P(i)|
  std::vector<std::vector<double>> g(n, std::vector<double>(n, 0.0));
  for (size_t i = 0; i < n; ++i) {
    double zmax = -std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < n; ++k)
      if (k != i) zmax = std::max(zmax, z[i][k]);
    double denom = 0.0;
    for (size_t k = 0; k < n; ++k)
      if (k != i) denom += std::exp(z[i][k] - zmax);
    int pos_count = 0;
    for (size_t j = 0; j < n; ++j)
      if (j != i && labels[j] == labels[i]) ++pos_count;
    for (size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      double p = std::exp(z[i][j] - zmax) / denom;
      g[i][j] = p - (labels[j] == labels[i] ? 1.0 / pos_count : 0.0);
    }
  }

  // dL/dphi_m = (1/tau) * sum_j (g[m][j] + g[j][m]) phi_j
  std::vector<Vector> grad(n, Vector(dim, 0.0));
  const int64_t ni = static_cast<int64_t>(n);
#pragma omp parallel for schedule(static) if (ni > 16)
  for (int64_t m = 0; m < ni; ++m) {
    for (size_t j = 0; j < n; ++j) {
      if (static_cast<size_t>(m) == j) continue;
      double w = (g[m][j] + g[j][m]) / tau;
      for (size_t d = 0; d < dim; ++d) grad[m][d] += w * phi[j][d];
    }
  }
  return grad;
}

double ce_loss(const std::vector<Vector>& logits, const std::vector<int>& labels) {
  if (logits.size() != labels.size())
    throw ValidationError("ce_loss: logits and labels differ in length");
  if (logits.empty()) throw ValidationError("ce_loss: empty batch");
  const size_t C = logits[0].size();
  double total = 0.0;
  for (size_t i = 0; i < logits.size(); ++i) {
    if (labels[i] < 0 || static_cast<size_t>(labels[i]) >= C)
      throw ValidationError("ce_loss: label " + std::to_string(labels[i]) +
                            " out of range [0, " + std::to_string(C) + ")");
    double m = *std::max_element(logits[i].begin(), logits[i].end());
    double denom = 0.0;
    for (double v : logits[i]) denom += std::exp(v - m);
    total += m + std::log(denom) - logits[i][labels[i]];
  }
  return total / static_cast<double>(logits.size());
}

std::vector<Vector> ce_grad(const std::vector<Vector>& logits, const std::vector<int>& labels) {
  // validation shared with ce_loss
  ce_loss(logits, labels);
  const size_t n = logits.size();
  const size_t C = logits[0].size();
  std::vector<Vector> grad(n, Vector(C, 0.0));
  for (size_t i = 0; i < n; ++i) {
    double m = *std::max_element(logits[i].begin(), logits[i].end());
    double denom = 0.0;
    for (double v : logits[i]) denom += std::exp(v - m);
    for (size_t c = 0; c < C; ++c) {
      double p = std::exp(logits[i][c] - m) / denom;
      grad[i][c] = (p - (static_cast<size_t>(labels[i]) == c ? 1.0 : 0.0)) / n;
    }
  }
  return grad;
}

AdapterGrad adapter_loss_and_grad(const AdapterParams& params,
                                  const std::vector<Vector>& batch_x,
                                  const std::vector<int>& labels, LossKind kind,
                                  const std::vector<double>* head, size_t n_classes) {
  const size_t B = batch_x.size();
  const size_t din = params.in_dim;
  const size_t dout = params.out_dim;

  // forward
  std::vector<Vector> u(B), phi(B);
  std::vector<double> norms(B, 0.0);
  for (size_t i = 0; i < B; ++i) {
    if (batch_x[i].size() != din)
      throw ValidationError("adapter_loss_and_grad: input dim mismatch");
    u[i].assign(dout, 0.0);
    for (size_t r = 0; r < dout; ++r) {
      const double* wrow = params.W.data() + r * din;
      double acc = 0.0;
      for (size_t c = 0; c < din; ++c) acc += wrow[c] * batch_x[i][c];
      u[i][r] = acc;
    }
    if (!params.b.empty())
      for (size_t r = 0; r < dout; ++r) u[i][r] += params.b[r];
    phi[i] = u[i];
    if (params.normalize_output) {
      double sq = 0.0;
      for (double v : u[i]) sq += v * v;
      norms[i] = std::sqrt(sq);
      if (norms[i] > 0.0)
        for (double& v : phi[i]) v /= norms[i];
    }
  }

  AdapterGrad out;
  std::vector<Vector> gphi;
  if (kind == LossKind::Scl) {
    out.loss = scl_loss(phi, labels, params.tau);
    gphi = scl_grad(phi, labels, params.tau);
  } else {
    if (head == nullptr || head->size() != n_classes * dout)
      throw ValidationError("adapter_loss_and_grad: cross-entropy needs a C x d' head");
    std::vector<Vector> logits(B, Vector(n_classes, 0.0));
    for (size_t i = 0; i < B; ++i)
      for (size_t c = 0; c < n_classes; ++c) {
        double acc = 0.0;
        for (size_t r = 0; r < dout; ++r) acc += (*head)[c * dout + r] * phi[i][r];
        logits[i][c] = acc;
      }
    out.loss = ce_loss(logits, labels);
    std::vector<Vector> dlogits = ce_grad(logits, labels);
    out.d_head.assign(n_classes * dout, 0.0);
    for (size_t c = 0; c < n_classes; ++c)
      for (size_t r = 0; r < dout; ++r) {
        double acc = 0.0;
        for (size_t i = 0; i < B; ++i) acc += dlogits[i][c] * phi[i][r];
        out.d_head[c * dout + r] = acc;
      }
    gphi.assign(B, Vector(dout, 0.0));
    for (size_t i = 0; i < B; ++i)
      for (size_t r = 0; r < dout; ++r) {
        double acc = 0.0;
        for (size_t c = 0; c < n_classes; ++c) acc += (*head)[c * dout + r] * dlogits[i][c];
        gphi[i][r] = acc;
      }
  }

  // chain through the normalization Jacobian (I - phi phi^T) / ||u||
  std::vector<Vector> gu(B);
  for (size_t i = 0; i < B; ++i) {
    if (params.normalize_output && norms[i] > 0.0) {
      double dot = 0.0;
      for (size_t r = 0; r < dout; ++r) dot += gphi[i][r] * phi[i][r];
      gu[i].assign(dout, 0.0);
      for (size_t r = 0; r < dout; ++r)
        gu[i][r] = (gphi[i][r] - dot * phi[i][r]) / norms[i];
    } else {
      gu[i] = gphi[i];
    }
  }

  // d_w[r][c] = sum_i gu_i[r] * x_i[c]; i ascending so the reduction order
  // is pinned regardless of threading
  out.d_w.assign(dout * din, 0.0);
  const int64_t rows = static_cast<int64_t>(dout);
#pragma omp parallel for schedule(static) if (rows > 32)
  for (int64_t r = 0; r < rows; ++r)
    for (size_t i = 0; i < B; ++i) {
      double g = gu[i][r];
      if (g == 0.0) continue;
      double* drow = out.d_w.data() + r * din;
      for (size_t c = 0; c < din; ++c) drow[c] += g * batch_x[i][c];
    }
  if (!params.b.empty()) {
    out.d_b.assign(dout, 0.0);
    for (size_t r = 0; r < dout; ++r)
      for (size_t i = 0; i < B; ++i) out.d_b[r] += gu[i][r];
  }
  return out;
}

TrainResult train_adapter(const std::vector<Vector>& base_vectors,
                          const std::vector<int>& labels,
                          const std::vector<std::optional<VerbObject>>& vo_pairs,
                          const Embedder& embedder, const SynonymLexicon& synonyms,
                          const TrainConfig& config) {
  const size_t n = base_vectors.size();
  if (labels.size() != n || vo_pairs.size() != n)
    throw ValidationError("train_adapter: inputs differ in length");
  if (n < 4) throw ValidationError("train_adapter: need at least 4 training items");
  if (config.max_epochs < 1 || !(config.tau > 0.0) || config.batch_n < 2)
    throw ValidationError("train_adapter: invalid config");

  std::map<int, int> freq;
  for (int y : labels) {
    if (y < 0) throw ValidationError("train_adapter: negative label");
    ++freq[y];
  }
  if (freq.size() < 2) throw ValidationError("train_adapter: need at least 2 distinct labels");
  std::string single;
  for (const auto& [label, count] : freq)
    if (count < 2) single += (single.empty() ? "" : ", ") + std::to_string(label);
  if (!single.empty())
    throw ValidationError("train_adapter: labels with a single instance: " + single);

  const size_t dim = base_vectors[0].size();
  for (const Vector& v : base_vectors)
    if (v.size() != dim) throw ValidationError("train_adapter: ragged base vectors");

  const size_t n_classes = static_cast<size_t>(freq.rbegin()->first) + 1;
  AdapterParams params = identity_adapter(dim, config.tau, config.normalize_output);
  std::vector<double> head(n_classes * dim, 0.0);  // CE only, discarded

  Rng rng(config.seed);
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;

  TrainResult result;
  double best_loss = std::numeric_limits<double>::infinity();
  double prev_loss = std::numeric_limits<double>::infinity();
  bool warned_fallback = false;

  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    size_t anchor_count = 0;

    for (size_t start = 0; start < n; start += static_cast<size_t>(config.batch_n)) {
      size_t m = std::min(static_cast<size_t>(config.batch_n), n - start);
      std::vector<Vector> batch_x;
      std::vector<int> batch_y;
      batch_x.reserve(2 * m);
      batch_y.reserve(2 * m);
      for (size_t t = 0; t < m; ++t) {
        batch_x.push_back(base_vectors[order[start + t]]);
        batch_y.push_back(labels[order[start + t]]);
      }
      for (size_t t = 0; t < m; ++t) {
        size_t idx = order[start + t];
        Vector twin = base_vectors[idx];
        if (vo_pairs[idx]) {
          VerbObject aug = augment_synonym(*vo_pairs[idx], synonyms, rng);
          if (auto v = embedder.embed_text(aug.text())) {
            twin = std::move(*v);
          } else if (!warned_fallback) {
            std::cerr << "warning: no embedding for augmented text \"" << aug.text()
                      << "\"; using the original vector\n";
            warned_fallback = true;
          }
        }
        batch_x.push_back(std::move(twin));
        batch_y.push_back(labels[idx]);
      }

      AdapterGrad g = adapter_loss_and_grad(params, batch_x, batch_y, config.loss_kind,
                                            &head, n_classes);
      for (size_t i = 0; i < params.W.size(); ++i)
        params.W[i] -= config.learning_rate * g.d_w[i];
      if (!g.d_head.empty())
        for (size_t i = 0; i < head.size(); ++i)
          head[i] -= config.learning_rate * g.d_head[i];

      loss_sum += g.loss;
      anchor_count += batch_x.size();
    }

    double epoch_mean = loss_sum / static_cast<double>(anchor_count);
    result.epoch_losses.push_back(epoch_mean);
    if (epoch_mean < best_loss) {
      best_loss = epoch_mean;
      result.params = params;
      result.best_epoch = epoch;
    }
    if (epoch > 0) {
      double improvement = (prev_loss - epoch_mean) / std::max(std::abs(prev_loss), 1e-12);
      if (improvement < config.early_stop_rel_tol) break;
    }
    prev_loss = epoch_mean;
  }
  return result;
}

}  // namespace intentforge
