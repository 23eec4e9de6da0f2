#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "zdpipe/matrix.hpp"
#include "zdpipe/rng.hpp"

namespace zdpipe {

enum class Family { LR, DT, RF, GBT, MLP };
enum class Criterion { Entropy, Gini };

std::string to_string(Family f);
Family family_from_string(const std::string& s);  // accepts xgb as an alias for GBT
std::string to_string(Criterion c);
Criterion criterion_from_string(const std::string& s);

/// Shannon entropy of a binary class distribution, in bits.
double entropy_impurity(std::int64_t count0, std::int64_t count1);
double gini_impurity(std::int64_t count0, std::int64_t count1);

// ---------------------------------------------------------------------------
// Hyperparameters
// ---------------------------------------------------------------------------

struct LrParams {
    double C = 1.0;
    int max_iter = 200;
    double tol = 1e-6;
};

struct TreeParams {
    Criterion criterion = Criterion::Entropy;
    int max_depth = 10;
    int min_samples_leaf = 1;
};

struct ForestParams {
    Criterion criterion = Criterion::Entropy;
    int max_depth = 10;
    int min_samples_leaf = 1;
    int n_estimators = 100;
};

struct GbtParams {
    double learning_rate = 0.1;
    int max_depth = 7;
    int n_rounds = 100;
    double lambda_reg = 1.0;
};

struct MlpParams {
    std::vector<int> hidden_layer_sizes{32};
    double alpha = 1e-4;
    double learning_rate = 0.01;
    int epochs = 50;
    int batch_size = 256;
};

struct ModelSpec {
    Family family = Family::LR;
    std::variant<LrParams, TreeParams, ForestParams, GbtParams, MlpParams> params = LrParams{};
    std::uint64_t seed = 0;

    static ModelSpec defaults(Family f, std::uint64_t seed = 0);
    /// Set one hyperparameter by name; throws on a name or value invalid for
    /// the family.
    void set_hparam(const std::string& name, const nlohmann::json& value);
    nlohmann::json hparams_json() const;
};

// ---------------------------------------------------------------------------
// Fitted models
// ---------------------------------------------------------------------------

/// One tree node; leaves have feature == -1 and carry leaf_value (a positive
/// fraction for classification trees, an additive weight for boosted trees).
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double leaf_value = 0.0;

    bool is_leaf() const { return feature < 0; }
};

class Classifier {
public:
    virtual ~Classifier() = default;
    /// Probability-like score in [0, 1] per row.
    virtual Vector score(const Matrix& X) const = 0;
    /// Hard labels; the default thresholds score at 0.5 with ties going to 1.
    virtual std::vector<int> predict(const Matrix& X) const;
    virtual Family family() const = 0;
    virtual nlohmann::json model_json() const = 0;

    int n_features = 0;

protected:
    void check_features(const Matrix& X) const;
};

class LogisticClassifier : public Classifier {
public:
    Vector weights;
    double intercept = 0.0;
    std::vector<double> loss_curve;

    Vector score(const Matrix& X) const override;
    Family family() const override { return Family::LR; }
    nlohmann::json model_json() const override;
};

class DecisionTreeClassifier : public Classifier {
public:
    std::vector<TreeNode> nodes;

    double score_row(const Eigen::Ref<const Eigen::RowVectorXd>& row) const;
    Vector score(const Matrix& X) const override;
    Family family() const override { return Family::DT; }
    nlohmann::json model_json() const override;
};

class RandomForestClassifier : public Classifier {
public:
    std::vector<std::vector<TreeNode>> trees;

    Vector score(const Matrix& X) const override;  // mean of tree leaf scores
    /// Fraction of trees voting 1 per row; predict() thresholds this at 0.5.
    Vector vote_fraction(const Matrix& X) const;
    std::vector<int> predict(const Matrix& X) const override;
    Family family() const override { return Family::RF; }
    nlohmann::json model_json() const override;
};

class GbtClassifier : public Classifier {
public:
    double base_score = 0.0;  // log-odds of the class prior
    double learning_rate = 0.1;
    std::vector<std::vector<TreeNode>> trees;
    std::vector<double> train_loss_curve;  // log-loss after each round
    bool stopped_early = false;

    Vector raw_margin(const Matrix& X) const;
    Vector score(const Matrix& X) const override;
    Family family() const override { return Family::GBT; }
    nlohmann::json model_json() const override;
};

/// Fully connected net with ReLU hidden layers and a sigmoid output. Exposed
/// as a plain struct so the analytic gradient can be checked against finite
/// differences.
struct MlpNet {
    std::vector<Matrix> W;  // layer l maps in -> out as (out x in)
    std::vector<Vector> b;
    double alpha = 0.0;  // L2 penalty coefficient on the weights (not biases)

    static MlpNet glorot(int n_inputs, const std::vector<int>& hidden, double alpha, Rng& rng);

    Vector forward(const Matrix& X) const;
    /// Mean log-loss plus alpha * sum of squared weights, with the gradient
    /// flattened in (W0, b0, W1, b1, ...) order.
    std::pair<double, Vector> loss_and_gradient(const Matrix& X, const std::vector<int>& y) const;

    Vector flat_params() const;
    void set_flat_params(const Vector& theta);
    Eigen::Index n_params() const;
};

class MlpClassifier : public Classifier {
public:
    MlpNet net;
    std::vector<double> loss_curve;  // full-set loss after each epoch
    bool retried_with_halved_rate = false;

    Vector score(const Matrix& X) const override;
    Family family() const override { return Family::MLP; }
    nlohmann::json model_json() const override;
};

struct FittedModel {
    Family family = Family::LR;
    std::shared_ptr<const Classifier> impl;
    double fit_time_seconds = 0.0;
    int n_features_expected = 0;

    Vector predict_score(const Matrix& X) const;
    std::vector<int> predict(const Matrix& X) const;
    std::string to_json_string() const;
    static FittedModel from_json_string(const std::string& text);
};

// ---------------------------------------------------------------------------
// Fitting
// ---------------------------------------------------------------------------

FittedModel fit_logistic(const Matrix& X, const std::vector<int>& y, double C, int max_iter,
                         double tol);
FittedModel fit_tree(const Matrix& X, const std::vector<int>& y, Criterion criterion,
                     int max_depth, int min_samples_leaf);
FittedModel fit_forest(const Matrix& X, const std::vector<int>& y, int n_estimators,
                       Criterion criterion, int max_depth, int min_samples_leaf,
                       std::uint64_t seed);
FittedModel fit_gbt(const Matrix& X, const std::vector<int>& y, double learning_rate,
                    int max_depth, int n_rounds, double lambda_reg);
FittedModel fit_mlp(const Matrix& X, const std::vector<int>& y, const MlpParams& params,
                    std::uint64_t seed);

/// Dispatch on the spec's family.
FittedModel fit_model(const ModelSpec& spec, const Matrix& X, const std::vector<int>& y);

// ---------------------------------------------------------------------------
// Internals exposed for verification
// ---------------------------------------------------------------------------

/// Loss and gradient of the regularized logistic objective at
/// theta = [weights; intercept]: mean log-loss + ||w||^2 / (2 C n), intercept
/// unpenalized.
std::pair<double, Vector> logistic_loss_gradient(const Matrix& X, const std::vector<int>& y,
                                                 const Vector& theta, double C);

struct SplitCandidate {
    int feature = -1;
    double threshold = 0.0;
    double gain = -1.0;  // negative means no valid split exists
};

/// Best (feature, midpoint threshold) over the given rows by impurity
/// decrease; gain ties break toward the lower feature index, then the lower
/// threshold. candidate_features must be in ascending order.
SplitCandidate best_split(const Matrix& X, const std::vector<int>& y,
                          const std::vector<std::size_t>& rows, Criterion criterion,
                          const std::vector<int>& candidate_features, int min_samples_leaf);

}  // namespace zdpipe
