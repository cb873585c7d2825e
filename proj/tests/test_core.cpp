#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "ssc/core.hpp"
#include "ssc/piecewise.hpp"
#include "ssc/sample_io.hpp"
#include "test_support.hpp"

using namespace ssc;
using testing_support::sample_from;

namespace {

Classifier<double> sign_of(double scale, double shift) {
  return {[=](const PointRef<double>& x) { return scale * x(0) + shift > 0 ? Label::Positive : Label::Negative; },
          "sign"};
}

CompressionScheme<double> identity_scheme() {
  return {"identity",
          [](const LabeledSample<double>& S) {
            std::vector<std::size_t> all(S.size());
            for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
            return all;
          },
          [](const LabeledSample<double>& S) {
            return S.empty() ? constant_classifier<double>(Label::Negative) : constant_classifier<double>(S.label(0));
          }};
}

// Keeps only the second-to-last item and predicts its label everywhere. Removing
// the final (uncompressed) item moves kappa, so the scheme is not stable.
CompressionScheme<double> last_element_scheme() {
  return {"second-to-last",
          [](const LabeledSample<double>& S) { return std::vector<std::size_t>{S.size() >= 2 ? S.size() - 2 : 0}; },
          [](const LabeledSample<double>& S) { return constant_classifier<double>(S.label(S.size() - 1)); }};
}

}  // namespace

TEST_CASE("empirical risk") {
  const auto pos = sample_from({{{1}, 1}, {{2}, 1}, {{3}, 1}});
  CHECK(empirical_risk(constant_classifier<double>(Label::Positive), pos) == 0.0);
  const auto mixed = sample_from({{{1}, 1}, {{2}, -1}});
  CHECK(empirical_risk(constant_classifier<double>(Label::Positive), mixed) == 0.5);
  CHECK(empirical_risk(sign_of(1.0, 1.0), sample_from({{{2}, 1}, {{-1}, -1}})) == 0.0);
  CHECK_THROWS_AS(empirical_risk(sign_of(1.0, 0.0), LabeledSample<double>()), EmptySample);

  std::mt19937_64 rng(1);
  const auto S = sample_from({{{0.3}, 1}, {{-0.2}, 1}, {{0.7}, -1}, {{-1.0}, -1}, {{0.1}, 1}});
  std::vector<std::size_t> order = {0, 1, 2, 3, 4};
  const double base = empirical_risk(sign_of(1.0, 0.0), S);
  for (int t = 0; t < 10; ++t) {
    std::shuffle(order.begin(), order.end(), rng);
    CHECK(empirical_risk(sign_of(1.0, 0.0), S.subset(order)) == base);
  }
}

TEST_CASE("classifier agreement") {
  PointMatrix<double> probes(2, 1);
  probes << -1.0, 1.0;
  const auto h = sign_of(1.0, 0.0);
  CHECK(classifiers_agree(h, h, probes));
  CHECK_FALSE(classifiers_agree(constant_classifier<double>(Label::Positive), constant_classifier<double>(Label::Negative),
                                probes));
  CHECK(classifiers_agree(sign_of(1.0, 0.0), sign_of(2.0, 0.0), probes));
  CHECK_THROWS_AS(classifiers_agree(h, h, PointMatrix<double>(0, 1)), InvalidRequest);
}

TEST_CASE("subsetting keeps order") {
  const auto S = sample_from({{{1}, 1}, {{2}, -1}, {{3}, 1}, {{4}, -1}});
  const std::size_t drop[] = {2, 0};
  const auto rest = S.without(drop);
  REQUIRE(rest.size() == 2);
  CHECK(rest.points()(0, 0) == 2.0);
  CHECK(rest.points()(1, 0) == 4.0);
}

TEST_CASE("stability checker") {
  const auto S = sample_from({{{1}, 1}, {{2}, -1}, {{3}, 1}});
  PointMatrix<double> probes(3, 1);
  probes << 0.0, 5.0, 10.0;

  const auto id = check_stability(identity_scheme(), S, 50, probes, 1);
  CHECK(id.trials == 1);
  CHECK(id.violations == 0);

  const auto last = check_stability(last_element_scheme(), sample_from({{{1}, -1}, {{2}, 1}, {{3}, 1}, {{4}, -1}}),
                                    50, probes, 1);
  CHECK(last.violations >= 1);
  REQUIRE(last.witness.has_value());
  CHECK(std::find(last.witness->removed.begin(), last.witness->removed.end(), 2) == last.witness->removed.end());
  CHECK(std::find(last.witness->removed.begin(), last.witness->removed.end(), 3) != last.witness->removed.end());

  CHECK_THROWS_AS(check_stability(identity_scheme(), S, 0, probes, 1), InvalidRequest);
  CHECK_THROWS_AS(check_stability(identity_scheme(), S, 5, PointMatrix<double>(0, 1), 1), InvalidRequest);
}

TEST_CASE("stability report does not depend on the worker count") {
  const auto S = sample_from({{{1}, -1}, {{2}, 1}, {{3}, 1}, {{4}, -1}, {{5}, 1}, {{6}, -1}});
  PointMatrix<double> probes(1, 1);
  probes << 0.0;
  StabilityReport<double> one;
  StabilityReport<double> many;
  {
    ScopedThreadCount t(1);
    one = check_stability(last_element_scheme(), S, 200, probes, 9);
  }
  {
    ScopedThreadCount t(8);
    many = check_stability(last_element_scheme(), S, 200, probes, 9);
  }
  CHECK(one.violations == many.violations);
  CHECK(one.witness->removed == many.witness->removed);
}

TEST_CASE("parallel_for propagates the lowest failing index") {
  ScopedThreadCount t(4);
  try {
    parallel_for(100, [](std::size_t i) {
      if (i == 37 || i == 80) throw std::runtime_error(std::to_string(i));
    });
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "37");
  }
}

TEST_CASE("sample text round trip") {
  const auto S = sample_from({{{0.1, -2.5}, 1}, {{1e-300, 3.0}, -1}});
  std::stringstream buf;
  write_sample(buf, S);
  CHECK(buf.str().rfind("x1,x2,label\n", 0) == 0);
  const auto back = read_sample(buf);
  CHECK(back.points() == S.points());
  CHECK(back.labels() == S.labels());

  std::stringstream bad_label("x1,label\n0.5,2\n");
  CHECK_THROWS_AS(read_sample(bad_label), ParseError);
  std::stringstream bad_cols("x1,label\n0.5\n");
  CHECK_THROWS_AS(read_sample(bad_cols), ParseError);
  std::stringstream bad_num("x1,label\nnan,1\n");
  CHECK_THROWS_AS(read_sample(bad_num), ParseError);
  std::stringstream no_header("");
  CHECK_THROWS_AS(read_sample(no_header), ParseError);
}

TEST_CASE("piecewise risk oracle") {
  const auto t5 = Piecewise1d::threshold(0.5);
  CHECK(exact_risk(t5, t5, Marginal1d::uniform()) == 0.0);
  CHECK(exact_risk(Piecewise1d::threshold(0.6), t5, Marginal1d::uniform()) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(exact_risk(t5, t5, Marginal1d::uniform(), 0.1) == doctest::Approx(0.1).epsilon(1e-12));
  const auto iv = Piecewise1d::interval(0.2, 0.3);
  CHECK(iv(0.2) == Label::Positive);
  CHECK(iv(0.3) == Label::Positive);
  CHECK(iv(0.31) == Label::Negative);
  CHECK(exact_risk(Piecewise1d::constant(Label::Negative), iv, Marginal1d::uniform()) ==
        doctest::Approx(0.1).epsilon(1e-12));
  const Marginal1d mix{{{0.0, 1.0, 1.0}, {10.0, 12.0, 3.0}}};
  CHECK(mix.mass(11.0, 20.0) == doctest::Approx(0.375).epsilon(1e-12));
}
