#include <gtest/gtest.h>

#include <algorithm>
#include <string>

#include "drgpb/model.hpp"
#include "drgpb/rng.hpp"
#include "test_util.hpp"

using drgpb::Mat;
using drgpb::MjlsModel;
using drgpb::PiSchedule;
using drgpb::PiSegment;
using drgpb::Vec;
using drgpb_test::scalar_model;

namespace {

MjlsModel two_mode_scalar(Mat pi, Vec p0) {
    MjlsModel m = scalar_model(0.9, 1.0, 1.0, 1.0, 0.0, 1.0);
    m.n_theta = 2;
    m.A = {Mat::Constant(1, 1, 0.9), Mat::Constant(1, 1, 0.5)};
    m.B = {Mat::Identity(1, 1), Mat::Identity(1, 1)};
    m.C = {Mat::Identity(1, 1), Mat::Identity(1, 1)};
    m.D = {Mat::Identity(1, 1), Mat::Identity(1, 1)};
    m.Pi = std::move(pi);
    m.p0_mode = std::move(p0);
    return m;
}

bool mentions(const drgpb::ValidationReport& rep, const std::string& needle) {
    return std::any_of(rep.violations.begin(), rep.violations.end(),
                       [&](const std::string& v) {
                           return v.find(needle) != std::string::npos;
                       });
}

} // namespace

TEST(ValidateModel, AcceptsStochasticRow) {
    Mat pi(2, 2);
    pi << 0.6, 0.4, 0.45, 0.55;
    Vec p0(2);
    p0 << 0.4, 0.6;
    const auto rep = drgpb::validate_model(two_mode_scalar(pi, p0));
    EXPECT_TRUE(rep.ok()) << rep.to_string();
}

TEST(ValidateModel, RejectsRowSumViolation) {
    Mat pi(2, 2);
    pi << 0.6, 0.6, 0.4, 0.6;
    Vec p0(2);
    p0 << 0.5, 0.5;
    const auto rep = drgpb::validate_model(two_mode_scalar(pi, p0));
    EXPECT_FALSE(rep.ok());
    EXPECT_TRUE(mentions(rep, "row sum != 1")) << rep.to_string();
}

TEST(ValidateModel, RejectsNegativeDefiniteNoise) {
    MjlsModel m = scalar_model(0.9, 1.0, 1.0, 1.0, 0.0, 1.0);
    m.W = -Mat::Identity(1, 1);
    const auto rep = drgpb::validate_model(m);
    EXPECT_FALSE(rep.ok());
    EXPECT_TRUE(mentions(rep, "W not PSD")) << rep.to_string();
}

TEST(ValidateModel, ReportsDimensionMismatch) {
    MjlsModel m = scalar_model(0.9, 1.0, 1.0, 1.0, 0.0, 1.0);
    m.C = {Mat::Identity(2, 2)};
    EXPECT_FALSE(drgpb::validate_model(m).ok());
}

TEST(PiScheduleTest, SingleSegmentAppliesEverywhere) {
    const Mat pi = Mat::Identity(2, 2);
    const PiSchedule sched(pi);
    EXPECT_EQ(sched.at(1), pi);
    EXPECT_EQ(sched.at(1000), pi);
}

TEST(PiScheduleTest, InclusiveStartBoundary) {
    Mat pi_a = Mat::Identity(2, 2);
    Mat pi_b(2, 2);
    pi_b << 0.5, 0.5, 0.5, 0.5;
    const PiSchedule sched(std::vector<PiSegment>{{1, pi_a}, {70, pi_b}});
    EXPECT_EQ(sched.at(30), pi_a);
    EXPECT_EQ(sched.at(69), pi_a);
    EXPECT_EQ(sched.at(70), pi_b);  // boundary step takes the new segment
    EXPECT_EQ(sched.at(100), pi_b);
    EXPECT_EQ(sched.breakpoints(), std::vector<int>{70});
}

TEST(PiScheduleTest, RejectsBadSegmentLists) {
    const Mat pi = Mat::Identity(2, 2);
    EXPECT_THROW(PiSchedule(std::vector<PiSegment>{}), drgpb::ConfigError);
    EXPECT_THROW(PiSchedule(std::vector<PiSegment>{{2, pi}}), drgpb::ConfigError);
    EXPECT_THROW(PiSchedule(std::vector<PiSegment>{{1, pi}, {1, pi}}),
                 drgpb::ConfigError);
    EXPECT_THROW(PiSchedule(std::vector<PiSegment>{{1, pi}, {5, pi}, {3, pi}}),
                 drgpb::ConfigError);
}

TEST(SampleTrajectory, NoiselessDeterministicRecursion) {
    MjlsModel m = scalar_model(0.5, 0.0, 1.0, 0.0, 1.0, 0.0);
    const auto traj = drgpb::sample_trajectory(m, 3, 123);
    ASSERT_EQ(traj.states.size(), 4u);
    EXPECT_DOUBLE_EQ(traj.states[0](0), 1.0);
    EXPECT_DOUBLE_EQ(traj.states[1](0), 0.5);
    EXPECT_DOUBLE_EQ(traj.states[2](0), 0.25);
    EXPECT_DOUBLE_EQ(traj.states[3](0), 0.125);
    for (int mode : traj.modes) EXPECT_EQ(mode, 0);
    for (size_t k = 0; k < 3; ++k)
        EXPECT_DOUBLE_EQ(traj.observations[k](0), traj.states[k + 1](0));
}

TEST(SampleTrajectory, SameSeedSameTrajectory) {
    auto rng = drgpb::make_stream(99, 0);
    const MjlsModel m = drgpb_test::random_model(rng, 2, 2, 2);
    const auto a = drgpb::sample_trajectory(m, 40, 7, 3);
    const auto b = drgpb::sample_trajectory(m, 40, 7, 3);
    ASSERT_EQ(a.modes, b.modes);
    for (size_t k = 0; k < a.states.size(); ++k)
        EXPECT_EQ(a.states[k], b.states[k]);
    for (size_t k = 0; k < a.observations.size(); ++k)
        EXPECT_EQ(a.observations[k], b.observations[k]);

    const auto c = drgpb::sample_trajectory(m, 40, 7, 4);
    bool any_diff = false;
    for (size_t k = 0; k < a.observations.size() && !any_diff; ++k)
        any_diff = a.observations[k] != c.observations[k];
    EXPECT_TRUE(any_diff) << "different streams should decorrelate";
}

TEST(SampleTrajectory, DeterministicChainAlternates) {
    Mat pi(2, 2);
    pi << 0.0, 1.0, 1.0, 0.0;
    Vec p0(2);
    p0 << 1.0, 0.0;
    const MjlsModel m = two_mode_scalar(pi, p0);
    const auto traj = drgpb::sample_trajectory(m, 6, 11);
    // theta_0 = mode 1 with certainty, so theta_1 onward alternates 2,1,2,1...
    for (int k = 0; k < 6; ++k) EXPECT_EQ(traj.modes[k], k % 2 == 0 ? 1 : 0);
}

TEST(SampleTrajectory, TransitionFrequenciesMatchChain) {
    Mat pi(2, 2);
    pi << 0.7, 0.3, 0.4, 0.6;
    Vec p0(2);
    p0 << 0.5, 0.5;
    const MjlsModel m = two_mode_scalar(pi, p0);
    const int n = 100000;
    const auto traj = drgpb::sample_trajectory(m, n, 2024);

    Mat counts = Mat::Zero(2, 2);
    for (size_t k = 1; k < traj.modes.size(); ++k)
        counts(traj.modes[k - 1], traj.modes[k]) += 1.0;

    // Pearson chi-square over both rows; df = 2, critical value 13.8155
    // at p = 0.001.
    double stat = 0.0;
    for (int i = 0; i < 2; ++i) {
        const double row_total = counts.row(i).sum();
        for (int j = 0; j < 2; ++j) {
            const double expected = row_total * pi(i, j);
            stat += (counts(i, j) - expected) * (counts(i, j) - expected) /
                    expected;
        }
    }
    EXPECT_LT(stat, 13.8155);
}

TEST(SampleTrajectory, RejectsBadInputs) {
    const MjlsModel m = scalar_model(0.5, 1.0, 1.0, 1.0, 0.0, 1.0);
    EXPECT_THROW(drgpb::sample_trajectory(m, 0, 1), drgpb::ConfigError);
    MjlsModel bad = m;
    bad.p0_mode = Vec::Constant(1, 0.5);
    EXPECT_THROW(drgpb::sample_trajectory(bad, 5, 1), drgpb::ConfigError);
}

TEST(ScheduledModelTest, ViewSwitchesPi) {
    Mat pi_a(2, 2), pi_b(2, 2);
    pi_a << 0.9, 0.1, 0.1, 0.9;
    pi_b << 0.2, 0.8, 0.8, 0.2;
    MjlsModel m = two_mode_scalar(pi_a, (Vec(2) << 0.5, 0.5).finished());
    const drgpb::ScheduledModel view(
        m, PiSchedule(std::vector<PiSegment>{{1, pi_a}, {10, pi_b}}));
    EXPECT_EQ(view.pi_at(9), pi_a);
    EXPECT_EQ(view.pi_at(10), pi_b);
    EXPECT_THROW(
        drgpb::ScheduledModel(m, PiSchedule(Mat::Identity(3, 3))),
        drgpb::ConfigError);
}
