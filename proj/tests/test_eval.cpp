#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "xidps/ablation.hpp"
#include "xidps/errors.hpp"
#include "xidps/metrics.hpp"
#include "xidps/openset.hpp"
#include "xidps/rng.hpp"
#include "xidps/sample_gen.hpp"
#include "xidps/zeroday.hpp"
#include "test_util.hpp"

using namespace xidps;

namespace {

// fixed-score detectors for rule-level tests
std::unique_ptr<test::FixedModel> fixed(std::vector<std::string> classes,
                                        std::initializer_list<double> scores,
                                        std::size_t n_features = 3) {
    Vector v(static_cast<Eigen::Index>(scores.size()));
    Eigen::Index i = 0;
    for (double s : scores) v[i++] = s;
    return std::make_unique<test::FixedModel>(n_features, std::move(classes), std::move(v));
}

RawTable labeled_table(const std::vector<std::pair<double, std::string>>& rows) {
    RawTable t;
    t.schema.columns = {{"f", ColumnKind::Numeric}, {"cat", ColumnKind::ClassLabel}};
    for (const auto& [v, cls] : rows) t.rows.push_back({std::to_string(v), cls});
    t.finalize();
    return t;
}

}  // namespace

TEST_CASE("accuracy: worked example and perfect diagonal") {
    ConfusionMatrix cm({"Normal", "Attack"}, 0);
    cm.counts << 9, 1, 1, 9;  // TN FP / FN TP
    CHECK(accuracy(cm) == doctest::Approx(0.9));
    CHECK(binary_accuracy(cm) == doctest::Approx(0.9));
    const auto b = cm.binary();
    CHECK(b.tp == 9);
    CHECK(b.tn == 9);
    CHECK(b.fp == 1);
    CHECK(b.fn == 1);

    ConfusionMatrix perfect({"A", "B", "C"}, 0);
    perfect.counts = Eigen::MatrixXi::Zero(3, 3);
    perfect.counts.diagonal() << 5, 7, 9;
    CHECK(accuracy(perfect) == 1.0);
    CHECK(binary_accuracy(perfect) == 1.0);
}

TEST_CASE("accuracy: empty matrix rejected") {
    ConfusionMatrix cm({"A", "B"}, 0);
    CHECK_THROWS_AS((void)accuracy(cm), Error);
    CHECK_THROWS_AS((void)binary_accuracy(cm), Error);
}

TEST_CASE("confusion matrix: row sums conserve per-class eval counts") {
    ConfusionMatrix cm({"Normal", "DoS", "Fuzzers"}, 0);
    const std::vector<std::pair<int, int>> events = {{0, 0}, {0, 1}, {1, 1}, {1, 1},
                                                     {1, 2}, {2, 2}, {2, 0}, {0, 0}};
    std::vector<int> per_class(3, 0);
    for (const auto& [t, p] : events) {
        cm.add(t, p);
        ++per_class[static_cast<std::size_t>(t)];
    }
    for (int t = 0; t < 3; ++t)
        CHECK(cm.counts.row(t).sum() == per_class[static_cast<std::size_t>(t)]);
    CHECK(cm.total() == static_cast<long>(events.size()));
}

TEST_CASE("property: binary accuracy equals one minus error rate") {
    Rng rng(41);
    for (int iter = 0; iter < 50; ++iter) {
        const int k = 2 + static_cast<int>(rng.uniform_int(4));
        std::vector<std::string> classes;
        for (int c = 0; c < k; ++c) classes.push_back("c" + std::to_string(c));
        ConfusionMatrix cm(classes, static_cast<int>(rng.uniform_int(k)));
        for (int t = 0; t < k; ++t)
            for (int p = 0; p < k; ++p)
                cm.counts(t, p) = static_cast<int>(rng.uniform_int(40));
        if (cm.total() == 0) cm.counts(0, 0) = 1;

        const auto b = cm.binary();
        const double total = static_cast<double>(cm.total());
        CHECK(binary_accuracy(cm) ==
              doctest::Approx(1.0 - static_cast<double>(b.fp + b.fn) / total).epsilon(1e-12));
        CHECK(b.tp + b.tn + b.fp + b.fn == cm.total());
    }
}

TEST_CASE("build_openset_split: unseen never leaks into train") {
    std::vector<std::pair<double, std::string>> rows;
    for (int i = 0; i < 20; ++i) rows.push_back({0.1 * i, "Normal"});
    for (int i = 0; i < 10; ++i) rows.push_back({1.0 + 0.1 * i, "DoS"});
    for (int i = 0; i < 6; ++i) rows.push_back({2.0 + 0.1 * i, "Backdoor"});
    auto table = labeled_table(rows);

    auto split = build_openset_split(table, {"Normal", "DoS"}, "Backdoor", 0.3, 5);
    for (std::size_t r = 0; r < split.train.n_rows(); ++r)
        CHECK(split.train.class_of(r) != "Backdoor");

    std::size_t backdoor_in_test = 0;
    for (std::size_t r = 0; r < split.test.n_rows(); ++r)
        if (split.test.class_of(r) == "Backdoor") ++backdoor_in_test;
    CHECK(backdoor_in_test == 6);
    CHECK(split.train.n_rows() + split.test.n_rows() == table.n_rows());

    CHECK_THROWS_AS(
        (void)build_openset_split(table, {"Normal"}, "Worms", 0.3, 5), Error);
    CHECK_THROWS_AS(
        (void)build_openset_split(table, {"Normal", "Worms"}, "Backdoor", 0.3, 5), Error);
}

TEST_CASE("novelty_score: worked examples") {
    auto m3 = fixed({"A", "B", "C"}, {0.2, 0.3, 0.5});
    CHECK(novelty_score(*m3, Vector::Zero(3)) == doctest::Approx(0.5));

    auto one = fixed({"only"}, {1.0});
    CHECK(novelty_score(*one, Vector::Zero(3)) == 0.0);

    auto uniform = fixed({"A", "B", "C", "D"}, {0.25, 0.25, 0.25, 0.25});
    CHECK(novelty_score(*uniform, Vector::Zero(3)) == doctest::Approx(0.75));
}

TEST_CASE("classify_openset: rule table") {
    const Vector x = Vector::Zero(3);

    // novelty above tau wins regardless of the binary view
    auto uncertain = fixed({"Normal", "DoS", "Fuzzers"}, {0.3, 0.3, 0.4});
    auto bin_normal = fixed({"Normal", "Attack"}, {0.9, 0.1});
    auto d1 = classify_openset(*uncertain, *bin_normal, x, 0.5);
    CHECK(d1.novel);

    // confident DoS, binary agrees nothing is wrong with Normal rows
    auto confident_dos = fixed({"Normal", "DoS", "Fuzzers"}, {0.05, 0.9, 0.05});
    auto d2 = classify_openset(*confident_dos, *bin_normal, x, 0.5);
    CHECK(!d2.novel);
    CHECK(d2.label_index == 1);

    // multiclass says Normal, binary disagrees: novel
    auto confident_normal = fixed({"Normal", "DoS", "Fuzzers"}, {0.9, 0.05, 0.05});
    auto bin_attack = fixed({"Normal", "Attack"}, {0.2, 0.8});
    auto d3 = classify_openset(*confident_normal, *bin_attack, x, 0.5);
    CHECK(d3.novel);
    CHECK(d3.binary_attack == doctest::Approx(0.8));

    // tau = 1 disables the novelty path
    auto d4 = classify_openset(*uncertain, *bin_normal, x, 1.0);
    CHECK(!d4.novel);
}

TEST_CASE("evaluate_openset: all-flagging detector saturates both rates") {
    EncodedMatrix test;
    test.feature_names = {"f"};
    test.source_columns = {"f"};
    test.values = Matrix::Zero(6, 1);
    test.class_names = {"Normal", "DoS", "Backdoor"};
    test.labels = {0, 0, 1, 1, 2, 2};
    test.binary = {0, 0, 1, 1, 1, 1};

    auto uncertain = fixed({"Normal", "DoS"}, {0.5, 0.5}, 1);
    auto bin = fixed({"Normal", "Attack"}, {0.5, 0.5}, 1);
    auto rates = evaluate_openset(*uncertain, *bin, test, "Backdoor", 0.2);
    CHECK(rates.flag_rate == 1.0);
    CHECK(rates.false_alarm_rate == 1.0);
    CHECK(rates.known_accuracy == 0.0);
}

TEST_CASE("evaluate_openset: hand-counted holdout") {
    // stump-style detectors over one feature: multiclass says Normal left of
    // 0.5 with margin 0.8, DoS right of 0.5 with margin 0.7; binary flags
    // attack right of 0.5; tau 0.35 keeps both side margins below it
    auto multiclass = std::make_unique<Stump>(
        1, std::vector<std::string>{"Normal", "DoS"}, 0, 0.5,
        [] { Vector v(2); v << 0.8, 0.2; return v; }(),
        [] { Vector v(2); v << 0.3, 0.7; return v; }());
    auto binary = std::make_unique<Stump>(
        1, std::vector<std::string>{"Normal", "Attack"}, 0, 0.5,
        [] { Vector v(2); v << 0.9, 0.1; return v; }(),
        [] { Vector v(2); v << 0.2, 0.8; return v; }());

    // 50 rows: 20 Normal at x=0.1 (novelty .2, not novel, binary normal ->
    // clean), 5 Normal at x=0.9 (argmax DoS -> false alarm), 15 DoS at x=0.9
    // (argmax DoS -> correct known), 10 Backdoor at x=0.9 (argmax DoS ->
    // flagged as non-Normal)
    EncodedMatrix test;
    test.feature_names = {"f"};
    test.source_columns = {"f"};
    test.values = Matrix(50, 1);
    test.class_names = {"Normal", "DoS", "Backdoor"};
    for (int r = 0; r < 50; ++r) {
        const bool low = r < 20;
        test.values(r, 0) = low ? 0.1 : 0.9;
        if (r < 20) test.labels.push_back(0);
        else if (r < 25) test.labels.push_back(0);
        else if (r < 40) test.labels.push_back(1);
        else test.labels.push_back(2);
        test.binary.push_back(test.labels.back() == 0 ? 0 : 1);
    }

    auto rates = evaluate_openset(*multiclass, *binary, test, "Backdoor", 0.35);
    // hand counts: unseen 10/10 flagged; Normal flagged 5 of 25; known
    // correct = 20 Normal + 15 DoS of 40
    CHECK(rates.unseen_rows == 10);
    CHECK(rates.flag_rate == doctest::Approx(1.0));
    CHECK(rates.normal_rows == 25);
    CHECK(rates.false_alarm_rate == doctest::Approx(5.0 / 25.0));
    CHECK(rates.known_rows == 40);
    CHECK(rates.known_accuracy == doctest::Approx(35.0 / 40.0));
}

TEST_CASE("evaluate_openset: tau 1.0 leaves only the disagreement path") {
    auto multiclass = fixed({"Normal", "DoS"}, {0.6, 0.4}, 1);  // novelty 0.4
    auto bin_normal = fixed({"Normal", "Attack"}, {0.8, 0.2}, 1);

    EncodedMatrix test;
    test.feature_names = {"f"};
    test.source_columns = {"f"};
    test.values = Matrix::Zero(4, 1);
    test.class_names = {"Normal", "Backdoor"};
    test.labels = {0, 0, 1, 1};
    test.binary = {0, 0, 1, 1};

    auto rates = evaluate_openset(*multiclass, *bin_normal, test, "Backdoor", 1.0);
    CHECK(rates.flag_rate == 0.0);
    CHECK(rates.false_alarm_rate == 0.0);

    auto bin_attack = fixed({"Normal", "Attack"}, {0.1, 0.9}, 1);
    auto rates2 = evaluate_openset(*multiclass, *bin_attack, test, "Backdoor", 1.0);
    CHECK(rates2.flag_rate == 1.0);  // disagreement still fires
}

TEST_CASE("property: both rates are non-increasing in tau") {
    Rng rng(43);
    Matrix X = test::random_matrix(rng, 60, 3);
    std::vector<int> y;
    for (int r = 0; r < 60; ++r)
        y.push_back(X(r, 0) > 0.6 ? 1 : (X(r, 1) > 0.7 ? 2 : 0));
    auto multiclass = train_adaboost_m1(X, y, {"Normal", "DoS", "Fuzzers"}, 8);
    std::vector<int> yb;
    for (int v : y) yb.push_back(v == 0 ? 0 : 1);
    auto binary = train_adaboost_m1(X, yb, {"Normal", "Attack"}, 8);

    EncodedMatrix test;
    test.feature_names = {"a", "b", "c"};
    test.source_columns = {"a", "b", "c"};
    test.values = test::random_matrix(rng, 80, 3);
    test.class_names = {"Normal", "DoS", "Backdoor"};
    for (int r = 0; r < 80; ++r) {
        test.labels.push_back(static_cast<int>(rng.uniform_int(3)));
        test.binary.push_back(test.labels.back() == 0 ? 0 : 1);
    }

    double prev_flag = 2.0, prev_fa = 2.0;
    for (double tau = 0.0; tau <= 1.001; tau += 0.1) {
        auto rates = evaluate_openset(multiclass, binary, test, "Backdoor", tau);
        CHECK(rates.flag_rate <= prev_flag + 1e-12);
        CHECK(rates.false_alarm_rate <= prev_fa + 1e-12);
        prev_flag = rates.flag_rate;
        prev_fa = rates.false_alarm_rate;
    }
}

TEST_CASE("calibrate_tau: smallest tau under the false-alarm budget") {
    // novelty of Normal rows spread over {0, .2, .4, .6, .8}; binary always
    // agrees, so false alarms come from the novelty path alone
    Matrix X(5, 1);
    X << 0.0, 0.2, 0.4, 0.6, 0.8;
    // model novelty for row x is 1 - max score; craft scores via stumps is
    // overkill here: use per-row novelty through a feature-dependent model
    class RampModel : public Model {
    public:
        RampModel() { classes_ = {"Normal", "Attack"}; }
        std::string kind() const override { return "ramp"; }
        std::size_t n_features() const override { return 1; }
        void score_into(const double* x, double* out) const override {
            out[0] = 1.0 - x[0];  // novelty equals x
            out[1] = x[0];
        }
        nlohmann::json to_json() const override { return {}; }
        std::unique_ptr<Model> clone() const override {
            return std::make_unique<RampModel>(*this);
        }
    };
    RampModel multiclass;  // argmax Normal while x < 0.5
    auto binary = fixed({"Normal", "Attack"}, {1.0, 0.0}, 1);

    std::vector<std::uint8_t> is_normal(5, 1);
    // 20% budget: exactly one of five rows may exceed tau
    const double tau = calibrate_tau(multiclass, *binary, X, is_normal, 0.20);
    // novelty values: 0,.2,.4 flagged-as-novel when above tau; rows at .6/.8
    // argmax Attack (flagged regardless of tau)... false alarm floor is 2/5
    // which exceeds the budget, so calibration walks to the largest candidate
    CHECK(tau == 1.0);

    const double tau2 = calibrate_tau(multiclass, *binary, X, is_normal, 0.60);
    // budget 3/5: tau can stay small; novelty>0 flags rows .2/.4 plus the two
    // argmax-Attack rows = 4/5 too many at tau=0, so tau=0.2 (flags .4 row)
    CHECK(tau2 == doctest::Approx(0.2));
}

TEST_CASE("ablation: report shape and determinism on a small sample") {
    auto dir = test::tmp_dir("ablation");
    SampleOptions sopt;
    sopt.rows = 600;
    sopt.seed = 3;
    write_unsw_sample((dir / "sample.csv").string(), sopt);
    auto table = load_unsw((dir / "sample.csv").string());

    AblationConfig cfg;
    cfg.models = {"stump", "adaboost_m1"};
    cfg.k = 10;
    cfg.budget = 24;
    cfg.n_permutations = 4;
    cfg.timing_repetitions = 2;
    cfg.background_size = 20;
    cfg.hp.boost_rounds = 8;
    cfg.hp.subspace_members = 4;

    auto report = run_ablation(table, cfg, "fp-test");
    REQUIRE(report.rows.size() == 2);
    for (const auto& row : report.rows) {
        // exactly two accuracy and two timing entries per model
        CHECK(row.anomaly_acc_all >= 0.0);
        CHECK(row.anomaly_acc_topk >= 0.0);
        CHECK(row.time_all.median_ms >= 0.0);
        CHECK(row.time_topk.median_ms >= 0.0);
        CHECK(row.time_all.repetitions == 2);
    }
    CHECK(report.anomaly_top_attributes.size() == 10);
    CHECK(report.pattern_top_attributes.size() == 10);

    auto again = run_ablation(table, cfg, "fp-test");
    CHECK(report.anomaly_top_attributes == again.anomaly_top_attributes);
    CHECK(report.pattern_top_attributes == again.pattern_top_attributes);
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        CHECK(report.rows[i].anomaly_acc_all == again.rows[i].anomaly_acc_all);
        CHECK(report.rows[i].anomaly_acc_topk == again.rows[i].anomaly_acc_topk);
        CHECK(report.rows[i].pattern_acc_all == again.rows[i].pattern_acc_all);
        CHECK(report.rows[i].pattern_acc_topk == again.rows[i].pattern_acc_topk);
    }

    const std::string fig8 = fig8_ablation_csv(report);
    CHECK(fig8.find("# config_fingerprint=fp-test") == 0);
    CHECK(fig8.find("stump,") != std::string::npos);
}

TEST_CASE("zeroday: runner produces calibrated rates per model") {
    auto dir = test::tmp_dir("zeroday");
    SampleOptions sopt;
    sopt.rows = 900;
    sopt.seed = 11;
    write_unsw_sample((dir / "sample.csv").string(), sopt);
    auto table = load_unsw((dir / "sample.csv").string());

    ZeroDayConfig cfg;
    cfg.models = {"adaboost_m1"};
    cfg.hp.boost_rounds = 12;
    auto report = run_zeroday(table, cfg, "fp-zd");
    REQUIRE(report.results.size() == 1);
    const auto& r = report.results[0];
    CHECK(r.tau >= 0.0);
    CHECK(r.tau <= 1.0);
    CHECK(r.rates.unseen_rows > 0);
    CHECK(r.rates.flag_rate >= 0.0);
    CHECK(r.rates.false_alarm_rate <= 0.35);  // calibrated on validation

    const std::string fig6 = fig6_detection_csv(report);
    CHECK(fig6.find("adaboost_m1,") != std::string::npos);
}

TEST_CASE("median: odd and even counts") {
    CHECK(median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
    CHECK(median({}) == 0.0);
}
