#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "jk/bench.hpp"
#include "jk/binomial.hpp"
#include "jk/dataset.hpp"
#include "jk/serialization.hpp"
#include "jk/verify.hpp"

using namespace jk;

namespace {

bool same_dataset(const Dataset& a, const Dataset& b) {
  if (a.n != b.n || a.size() != b.size() || a.meta != b.meta) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.examples[i].y != b.examples[i].y || a.examples[i].x != b.examples[i].x) return false;
  }
  return true;
}

bool has_failure(const VerifyReport& report, const std::string& module, const std::string& check) {
  for (const auto* f : report.failures()) {
    if (f->module == module && f->check == check) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("dataset round trip is bit exact") {
  Dataset data;
  data.n = 3;
  data.meta = {{"generator", "manual"}};
  data.examples.push_back({HypercubePoint::parse("101"), 1.0 / 3.0});
  data.examples.push_back({HypercubePoint::parse("011"), -0.1});
  data.examples.push_back({HypercubePoint::parse("000"), 1e-300});
  std::stringstream ss;
  write_dataset(data, ss);
  const auto back = read_dataset(ss);
  CHECK(same_dataset(data, back));

  Dataset real;
  real.n = 2;
  real.examples.push_back({std::vector<double>{0.1, 0.7000000000000001}, 1.0});
  real.examples.push_back({std::vector<double>{std::nextafter(0.5, 1.0), 0.0}, -1.0});
  const auto path = std::filesystem::temp_directory_path() / "jk_test_real.jsonl";
  save_dataset(real, path);
  const auto loaded = load_dataset(path);
  std::filesystem::remove(path);
  CHECK(loaded.n == 2);
  CHECK(same_dataset(real, loaded));
  CHECK_FALSE(loaded.binary());
  CHECK_THROWS(loaded.points());
}

TEST_CASE("dataset reader infers the dimension and validates") {
  std::stringstream ok("{\"x\": \"0110\", \"y\": 1}\n{\"x\": \"1100\", \"y\": 0}\n");
  const auto data = read_dataset(ok);
  CHECK(data.n == 4);
  CHECK(data.size() == 2);
  CHECK(data.labels() == std::vector<double>{1.0, 0.0});
  std::stringstream mixed("{\"x\": \"0110\", \"y\": 1}\n{\"x\": \"110\", \"y\": 0}\n");
  CHECK_THROWS(read_dataset(mixed));
  std::stringstream bad("{\"x\": \"0110\"}\n");
  CHECK_THROWS(read_dataset(bad));
  CHECK(to_signed_labels(std::vector<double>{0.0, 1.0, -1.0}) == std::vector<double>{-1.0, 1.0, -1.0});
}

TEST_CASE("model json round trip") {
  const auto spec = sparse_conjunction_kernel(8, 3, 2);
  TrainedModel model{spec, {HypercubePoint::parse("11000000"), HypercubePoint::parse("00111000")}, {0.1, -2.0 / 3.0}};
  const auto back = trained_model_from_json(Json::parse(to_json(model).dump()));
  CHECK(back.alphas == model.alphas);
  CHECK(back.support == model.support);
  CHECK(back.spec.kind() == KernelKind::sparse_conjunction);
  const auto x = HypercubePoint::parse("11100000");
  CHECK(back.predict(x) == model.predict(x));
}

TEST_CASE("conjunction generator") {
  SUBCASE("empty conjunction is always true") {
    const auto data = gen_conjunction_dataset({8, {}, SamplingMode::sparse, 3, 0.0}, 50, 1);
    for (double y : data.labels()) CHECK(y == 1.0);
  }
  SUBCASE("labels follow the conjunction exactly") {
    const std::vector<int> lits{0, 1};
    const auto data = gen_conjunction_dataset({8, lits, SamplingMode::sparse, 3, 0.0}, 100, 2);
    for (const auto& ex : data.examples) {
      const auto& x = std::get<HypercubePoint>(ex.x);
      CHECK(x.weight() == 3);
      CHECK(ex.y == ((x.test(0) && x.test(1)) ? 1.0 : 0.0));
    }
  }
  SUBCASE("half noise decorrelates labels") {
    const std::vector<int> lits{0, 1};
    const std::size_t m = 4000;
    const auto data = gen_conjunction_dataset({8, lits, SamplingMode::uniform_layer, 3, 0.5}, m, 3);
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (const auto& ex : data.examples) {
      const double c = conjunction_value(lits, std::get<HypercubePoint>(ex.x));
      sx += c;
      sy += ex.y;
      sxx += c * c;
      syy += ex.y * ex.y;
      sxy += c * ex.y;
    }
    const double md = static_cast<double>(m);
    const double cov = sxy / md - sx / md * sy / md;
    const double corr = cov / std::sqrt((sxx / md - sx * sx / (md * md)) * (syy / md - sy * sy / (md * md)));
    CHECK(std::abs(corr) <= 3.0 / std::sqrt(md));
  }
  SUBCASE("a layer below the literal count warns") {
    const std::vector<int> lits{0, 1, 2};
    const auto data = gen_conjunction_dataset({8, lits, SamplingMode::sparse, 2, 0.0}, 20, 4);
    CHECK(data.meta.contains("warning"));
    for (double y : data.labels()) CHECK(y == 0.0);
  }
  SUBCASE("regeneration from meta is identical") {
    const auto data = gen_conjunction_dataset({12, {3, 7}, SamplingMode::sparse, 4, 0.1}, 64, 5);
    CHECK(same_dataset(data, regenerate_dataset(data.meta)));
    const auto holdout = gen_conjunction_dataset({12, {3, 7}, SamplingMode::sparse, 4, 0.1}, 64, 5, Stream::holdout);
    CHECK_FALSE(same_dataset(data, holdout));
    CHECK(same_dataset(holdout, regenerate_dataset(holdout.meta)));
  }
  CHECK(random_literals(16, 4, 9) == random_literals(16, 4, 9));
  CHECK(random_literals(16, 4, 9).size() == 4);
}

TEST_CASE("sparse analytic bench is exact") {
  for (int lits = 1; lits <= 4; ++lits) {
    BenchConfig cfg;
    cfg.algo = BenchAlgo::sparse_analytic;
    cfg.literals = lits;
    cfg.m = 200;
    const auto report = bench_conjunction(cfg);
    CHECK(report.test.zero_one == 0.0);
    CHECK(report.train.zero_one == 0.0);
    CHECK(report.norm_squared == doctest::Approx(binomial(4, lits)).epsilon(1e-12));
    CHECK(same_dataset(regenerate_dataset(report.dataset_meta),
                       gen_conjunction_dataset({16, report.dataset_meta["params"]["literals"].get<std::vector<int>>(),
                                                SamplingMode::sparse, 4, 0.0},
                                               200, 0)));
  }
}

TEST_CASE("bench under pure noise cannot beat chance") {
  BenchConfig cfg;
  cfg.n = 10;
  cfg.s = 3;
  cfg.m = 200;
  cfg.noise_rate = 0.5;
  cfg.epochs = 30;
  for (auto algo : {BenchAlgo::universal, BenchAlgo::sparse_analytic}) {
    cfg.algo = algo;
    const auto report = bench_conjunction(cfg);
    CHECK(report.test.zero_one >= 0.5 - 3.0 / std::sqrt(200.0));
  }
}

TEST_CASE("bench reports are deterministic") {
  BenchConfig cfg;
  cfg.n = 8;
  cfg.s = 3;
  cfg.m = 60;
  cfg.epochs = 20;
  cfg.seed = 4;
  auto a = bench_conjunction(cfg).to_json();
  auto b = bench_conjunction(cfg).to_json();
  a.erase("seconds");
  b.erase("seconds");
  CHECK(a == b);
  CHECK(a.contains("lambda"));
  CHECK(a.contains("train"));
  CHECK(a.contains("test"));
}

TEST_CASE("verify suite passes clean and names injected faults") {
  VerifyOptions opt;
  opt.max_n = 4;
  opt.trials = 100;
  const auto clean = verify_suite(opt);
  CHECK(clean.passed());
  CHECK(clean.checks.size() > 20);

  opt.fault = Fault::delta_sign;
  const auto delta = verify_suite(opt);
  CHECK_FALSE(delta.passed());
  CHECK(has_failure(delta, "johnson_scheme", "spectral"));
  bool named = false;
  for (const auto* f : delta.failures()) {
    if (f->check == "spectral" && f->params.contains("n") && f->params.contains("p") &&
        f->params.contains("l") && f->params.contains("j")) {
      named = true;
    }
  }
  CHECK(named);

  opt.fault = Fault::eta_shift;
  const auto eta = verify_suite(opt);
  CHECK_FALSE(eta.passed());
  CHECK(has_failure(eta, "johnson_scheme", "characterization"));

  opt.fault = Fault::conjugate_sign;
  const auto conj = verify_suite(opt);
  CHECK_FALSE(conj.passed());
  CHECK(has_failure(conj, "learners", "fenchel_young"));

  const auto j = conj.to_json();
  CHECK(j["passed"] == false);
  CHECK(parse_fault(fault_name(Fault::eta_shift)) == Fault::eta_shift);
  CHECK_THROWS(parse_fault("nonsense"));
}
