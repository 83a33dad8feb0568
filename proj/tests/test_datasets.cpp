/// @file
/// @brief Dataset recipes: generation, augmentation, verification, and the
/// on-disk NPY + manifest layout.

#include "covaug/datasets.hpp"

#include "covaug/metrics.hpp"
#include "covaug/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

using namespace covaug;

namespace {

std::filesystem::path temp_dir(const char* name) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  return dir;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

bool same_channels(const Dataset& lhs, const Dataset& rhs) {
  if (lhs.channels.size() != rhs.channels.size()) return false;
  for (std::size_t c = 0; c < lhs.channels.size(); ++c) {
    if (lhs.channels[c].name != rhs.channels[c].name) return false;
    if (lhs.channels[c].sample_shape != rhs.channels[c].sample_shape) return false;
    if (lhs.channels[c].rows != rhs.channels[c].rows) return false;  // bitwise
  }
  return true;
}

/// Small wave spec whose time step violates the stability bound for every
/// draw, so each sample exhausts its retries and is recorded as failed.
DatasetSpec doomed_wave_spec() {
  DatasetSpec spec = default_spec("wave5_1d");
  spec.nt = 2;  // dt = 1.0 >> h / sqrt(max c)
  spec.n_samples = 2;
  spec.master_seed = 3;
  return spec;
}

}  // namespace

// ===========================================================================
// Recipes and schemas
// ===========================================================================

TEST_CASE("recipe defaults match their documented parameters") {
  CHECK(known_recipes().size() == 8);
  for (const std::string& name : known_recipes()) CHECK(default_spec(name).name == name);

  const DatasetSpec cd = default_spec("convdiff_1d");
  CHECK(cd.dim == 1);
  CHECK(cd.equation == EquationKind::convdiff);
  CHECK(cd.n == 100);
  CHECK(cd.nt == 200);
  CHECK(cd.t_final == 1.0);
  CHECK(cd.modes == 5);
  CHECK(cd.source_modes == 10);
  CHECK(cd.scale == 0.01);
  CHECK(cd.store_trajectory);

  CHECK(default_spec("wave5_1d").modes == 5);
  CHECK(default_spec("wave10_1d").modes == 10);
  CHECK(default_spec("wave10_1d").nt == 1000);

  CHECK_FALSE(default_spec("elliptic_alpha_2d").diagonal_diffusion);
  CHECK(default_spec("elliptic_beta_2d").diagonal_diffusion);
  CHECK(default_spec("elliptic_alpha_2d").scale == 0.1);
  CHECK(default_spec("elliptic_alpha_2d", Complexity::complex).scale == 0.5);

  const DatasetSpec cd2 = default_spec("convdiff_2d", Complexity::complex);
  CHECK(cd2.t_final == 1e-2);
  CHECK(cd2.scale == 0.5);
  CHECK_FALSE(cd2.store_trajectory);

  CHECK(default_spec("wave_2d").t_final == 0.1);
  CHECK(default_spec("wave_2d", Complexity::complex).t_final == 1.0);

  CHECK_THROWS_AS(default_spec("heat_3d"), std::invalid_argument);
  CHECK_THROWS_AS(equation_from_name("parabolic"), std::invalid_argument);
  CHECK_THROWS_AS(complexity_from_name("medium"), std::invalid_argument);
}

TEST_CASE("generating stationary diffusion samples fills every channel") {
  DatasetSpec spec = default_spec("elliptic_1d");
  spec.n_samples = 4;
  spec.master_seed = 1;
  const Dataset ds = generate_dataset(spec);

  REQUIRE(ds.channels.size() == 3);
  CHECK(ds.channels[0].name == "a");
  CHECK(ds.channels[1].name == "f");
  CHECK(ds.channels[2].name == "u");
  for (const Channel& ch : ds.channels) {
    CHECK(ch.sample_shape == std::vector<std::size_t>{100});
    CHECK(ch.rows.rows() == 4);
    CHECK(ch.rows.cols() == 100);
    CHECK(ch.rows.allFinite());
  }
  CHECK(ds.channel("a").rows.minCoeff() > 0.0);  // uniformly positive diffusion
  for (int i = 0; i < 4; ++i) {
    CHECK(ds.channel("u").rows(i, 0) == 0.0);
    CHECK(ds.channel("u").rows(i, 99) == 0.0);
    CHECK(ds.channel("u").rows.row(i).norm() > 0.0);
    CHECK(ds.samples[i].status == "solved");
    CHECK(ds.samples[i].retries == 0);
    CHECK(ds.samples[i].seed == derive_seed(1, static_cast<std::uint64_t>(i)));
    CHECK(ds.samples[i].augmentation.is_null());
  }
  CHECK(ds.augmentation.is_null());
}

TEST_CASE("trajectory channels store every time level") {
  DatasetSpec spec = default_spec("convdiff_1d");
  spec.n_samples = 2;
  spec.master_seed = 5;
  const Dataset ds = generate_dataset(spec);

  CHECK(ds.channel("phi").sample_shape == std::vector<std::size_t>{200, 100});
  CHECK(ds.channel("phi0").sample_shape == std::vector<std::size_t>{100});
  for (int i = 0; i < 2; ++i) {
    // The initial-state channel is time level zero of the trajectory.
    CHECK(ds.channel("phi").rows.row(i).head(100) == ds.channel("phi0").rows.row(i));
    CHECK(ds.channel("phi0").rows(i, 0) == 0.0);  // Dirichlet clip
  }
}

TEST_CASE("two-dimensional recipes carry tensor channels") {
  DatasetSpec spec = default_spec("elliptic_beta_2d");
  spec.n = 21;
  spec.n_samples = 1;
  spec.master_seed = 2;
  const Dataset ds = generate_dataset(spec);

  for (const char* name : {"a11", "a12", "a22", "f", "u"}) {
    CHECK(ds.has_channel(name));
    CHECK(ds.channel(name).sample_shape == std::vector<std::size_t>({21, 21}));
  }
  // The diagonal variant drops the off-diagonal entry and repeats a11.
  CHECK(ds.channel("a12").rows.cwiseAbs().maxCoeff() == 0.0);
  CHECK(ds.channel("a11").rows == ds.channel("a22").rows);
  CHECK(ds.channel("a11").rows.minCoeff() >= 1.0);  // identity plus a square

  DatasetSpec wave = default_spec("wave_2d");
  wave.n = 21;
  wave.nt = 11;
  wave.t_final = 1e-3;
  wave.n_samples = 1;
  wave.master_seed = 2;
  const Dataset wd = generate_dataset(wave);
  CHECK_FALSE(wd.has_channel("e"));  // no zeroth-order channel in 2D
  CHECK(wd.channel("rho").sample_shape == std::vector<std::size_t>({21, 21}));
  CHECK(wd.channel("rho0").rows != wd.channel("rho").rows);  // final slice, not a copy
}

// ===========================================================================
// Determinism
// ===========================================================================

TEST_CASE("generation is bit-reproducible and independent of worker count") {
  DatasetSpec spec = default_spec("convdiff_1d");
  spec.n_samples = 6;
  spec.master_seed = 11;
  const Dataset serial = generate_dataset(spec, 1);
  const Dataset again = generate_dataset(spec, 1);
  const Dataset threaded = generate_dataset(spec, 4);
  CHECK(same_channels(serial, again));
  CHECK(same_channels(serial, threaded));
  CHECK(manifest_json(serial) == manifest_json(threaded));
}

TEST_CASE("augmentation is bit-reproducible and independent of worker count") {
  DatasetSpec spec = default_spec("elliptic_1d");
  spec.n_samples = 5;
  spec.master_seed = 11;
  const Dataset ds = generate_dataset(spec);
  AugmentOptions opt;
  opt.factor = 3;
  opt.seed = 21;
  const Dataset serial = augment_dataset(ds, opt);
  opt.jobs = 4;
  const Dataset threaded = augment_dataset(ds, opt);
  CHECK(same_channels(serial, threaded));
  CHECK(manifest_json(serial) == manifest_json(threaded));
}

// ===========================================================================
// Augmentation
// ===========================================================================

TEST_CASE("augmentation appends transformed replicas after the originals") {
  DatasetSpec spec = default_spec("elliptic_1d");
  spec.n_samples = 4;
  spec.master_seed = 9;
  const Dataset ds = generate_dataset(spec);
  AugmentOptions opt;
  opt.factor = 2;
  opt.seed = 77;
  const Dataset aug = augment_dataset(ds, opt);

  CHECK(aug.spec.n_samples == 12);  // (1 + 2) * 4
  REQUIRE(aug.samples.size() == 12);
  for (const Channel& ch : aug.channels) {
    CHECK(ch.rows.rows() == 12);
    // Originals come first, byte for byte.
    CHECK(ch.rows.topRows(4) == ds.channel(ch.name).rows);
  }
  CHECK(aug.augmentation.at("factor") == 2);
  CHECK(aug.augmentation.at("map_modes") == 5);   // 1D default family
  CHECK(aug.augmentation.at("map_beta") == 1.0);  // 1D default margin
  CHECK(aug.augmentation.at("seed") == 77);

  for (int i = 0; i < 4; ++i) {
    for (int r = 0; r < 2; ++r) {
      const SampleRecord& rec = aug.samples[4 + i * 2 + r];
      CHECK(rec.status == "augmented");
      CHECK(rec.seed == ds.samples[i].seed);  // provenance points at the source
      CHECK(rec.augmentation.at("source") == i);
      CHECK(rec.augmentation.at("replica") == r);
      CHECK(rec.augmentation.at("map_seed") ==
            derive_seed(77, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(r)));
      CHECK_FALSE(rec.augmentation.at("map").at("identity").get<bool>());
      CHECK(rec.augmentation.at("map").at("density").contains("cos_coeffs"));
    }
  }
  // Replicas are genuinely new data.
  CHECK(aug.channel("u").rows.row(4) != aug.channel("u").rows.row(0));
  // Dirichlet zeros survive the coordinate change exactly.
  CHECK(aug.channel("u").rows.col(0).cwiseAbs().maxCoeff() == 0.0);
  CHECK(aug.channel("u").rows.col(99).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("factor zero copies the dataset and stamps the options") {
  DatasetSpec spec = default_spec("elliptic_1d");
  spec.n_samples = 3;
  spec.master_seed = 4;
  const Dataset ds = generate_dataset(spec);
  AugmentOptions opt;
  opt.factor = 0;
  opt.seed = 5;
  const Dataset copy = augment_dataset(ds, opt);
  CHECK(copy.spec.n_samples == 3);
  CHECK(same_channels(ds, copy));
  CHECK(copy.augmentation.at("factor") == 0);
  CHECK(copy.samples.size() == 3);
  CHECK(copy.samples[2].status == "solved");
}

TEST_CASE("augmented densities keep their spatial mass") {
  DatasetSpec spec = default_spec("convdiff_1d");
  spec.n_samples = 2;
  spec.master_seed = 8;
  const Dataset ds = generate_dataset(spec);
  AugmentOptions opt;
  opt.factor = 1;
  opt.seed = 13;
  const Dataset aug = augment_dataset(ds, opt);

  const double h = 1.0 / 99.0;
  for (int i = 0; i < 2; ++i) {
    const Eigen::VectorXd before = ds.channel("phi0").rows.row(i).transpose();
    const Eigen::VectorXd after = aug.channel("phi0").rows.row(2 + i).transpose();
    CHECK(std::abs(trapezoid(before, h) - trapezoid(after, h)) <= 5.0 * h * h);
  }
}

TEST_CASE("a two-dimensional augmentation keeps the diffusion tensor positive") {
  DatasetSpec spec = default_spec("elliptic_alpha_2d");
  spec.n = 21;
  spec.n_samples = 1;
  spec.master_seed = 6;
  const Dataset ds = generate_dataset(spec);
  AugmentOptions opt;
  opt.factor = 2;
  opt.seed = 31;
  const Dataset aug = augment_dataset(ds, opt);

  CHECK(aug.augmentation.at("map_modes") == 6);     // 2D default family
  CHECK(aug.augmentation.at("map_beta") == 1e-5);
  for (int row = 1; row <= 2; ++row) {
    const auto& a11 = aug.channel("a11").rows.row(row);
    const auto& a12 = aug.channel("a12").rows.row(row);
    const auto& a22 = aug.channel("a22").rows.row(row);
    CHECK(a11.minCoeff() > 0.0);
    CHECK((a11.cwiseProduct(a22) - a12.cwiseProduct(a12)).minCoeff() > 0.0);
  }
  // Replicated solution values stay pinned to zero on the boundary frame.
  const Eigen::MatrixXd u =
      Eigen::Map<const RowMatrixXd>(aug.channel("u").rows.row(1).data(), 21, 21);
  CHECK(u.row(0).cwiseAbs().maxCoeff() == 0.0);
  CHECK(u.col(20).cwiseAbs().maxCoeff() == 0.0);
}

// ===========================================================================
// Failure handling
// ===========================================================================

TEST_CASE("samples that exhaust their retries are recorded as failed") {
  const Dataset ds = generate_dataset(doomed_wave_spec());
  for (const SampleRecord& rec : ds.samples) {
    CHECK(rec.status == "failed");
    CHECK(rec.retries == 64);
    CHECK(rec.error.find("stability") != std::string::npos);
  }
  // Failed rows stay zeroed rather than carrying stale data.
  CHECK(ds.channel("rho").rows.cwiseAbs().maxCoeff() == 0.0);

  // Augmentation refuses to manufacture replicas of a failed sample.
  AugmentOptions opt;
  opt.factor = 1;
  opt.seed = 2;
  const Dataset aug = augment_dataset(ds, opt);
  CHECK(aug.samples[2].status == "failed");
  CHECK(aug.samples[2].error == "source sample failed during generation");
  CHECK(aug.samples[2].augmentation.is_null());

  // Verification skips them with a reason instead of judging zeros.
  const VerificationReport report = verify_dataset(aug);
  CHECK(report.skipped() == 4);
  CHECK(report.failed() == 0);
  CHECK(report.ok());
  CHECK(report.verdicts[0].note.find("failed") != std::string::npos);
}

// ===========================================================================
// Verification
// ===========================================================================

TEST_CASE("reference recipes verify under their default tolerances") {
  DatasetSpec spec = default_spec("elliptic_1d");
  spec.n_samples = 6;
  spec.master_seed = 0;
  const Dataset ds = generate_dataset(spec);
  AugmentOptions opt;
  opt.factor = 2;
  opt.seed = 1;
  const Dataset aug = augment_dataset(ds, opt);

  const VerificationReport report = verify_dataset(aug);
  CHECK(report.ok());
  CHECK(report.passed() == 18);
  CHECK(report.verdicts[0].tolerance == default_verify_tolerance(spec, false));
  CHECK(report.verdicts[7].tolerance == default_verify_tolerance(spec, true));
  CHECK(report.verdicts[7].rel_l2 > report.verdicts[0].rel_l2 * 0.0);  // measured, not copied

  // The wave solver satisfies the verifying stencil to roundoff.
  DatasetSpec wave = default_spec("wave5_1d");
  wave.n_samples = 3;
  wave.master_seed = 0;
  const VerificationReport wreport = verify_dataset(generate_dataset(wave));
  CHECK(wreport.ok());
  for (const SampleVerdict& v : wreport.verdicts) CHECK(v.rel_l2 <= 1e-8);
}

TEST_CASE("verification flags corrupted solutions") {
  DatasetSpec spec = default_spec("elliptic_1d");
  spec.n_samples = 3;
  spec.master_seed = 0;
  Dataset ds = generate_dataset(spec);
  ds.channel("u").rows *= -1.0;  // sign flip: residual jumps to O(1)
  const VerificationReport report = verify_dataset(ds);
  CHECK_FALSE(report.ok());
  CHECK(report.failed() == 3);
  CHECK(report.verdicts[0].rel_l2 > 1.0);
  CHECK_FALSE(report.verdicts[0].note.empty());

  // An explicit tolerance overrides the recipe default.
  const VerificationReport loose = verify_dataset(ds, 10.0);
  CHECK(loose.ok());
  CHECK(loose.verdicts[0].tolerance == 10.0);
}

TEST_CASE("verification skips targets without stored trajectories") {
  DatasetSpec spec = default_spec("convdiff_2d");
  spec.n = 21;
  spec.nt = 11;
  spec.n_samples = 1;
  spec.master_seed = 2;
  const Dataset ds = generate_dataset(spec);
  const VerificationReport report = verify_dataset(ds);
  CHECK(report.skipped() == 1);
  CHECK(report.passed() == 0);
  CHECK(report.ok());  // nothing measurable failed
  CHECK(report.verdicts[0].note.find("final time slice") != std::string::npos);
}

// ===========================================================================
// Persistence
// ===========================================================================

TEST_CASE("a dataset survives the disk round trip byte for byte") {
  DatasetSpec spec = default_spec("elliptic_1d");
  spec.n_samples = 4;
  spec.master_seed = 42;
  const Dataset ds = generate_dataset(spec);
  AugmentOptions opt;
  opt.factor = 1;
  opt.seed = 7;
  const Dataset aug = augment_dataset(ds, opt);

  const auto dir_a = temp_dir("covaug_roundtrip_a");
  const auto dir_b = temp_dir("covaug_roundtrip_b");
  write_dataset(aug, dir_a);
  const Dataset reread = read_dataset(dir_a);

  CHECK(same_channels(aug, reread));
  CHECK(reread.spec.name == "elliptic_1d");
  CHECK(reread.spec.n_samples == 8);
  CHECK(reread.spec.master_seed == 42);
  CHECK(reread.augmentation == aug.augmentation);
  CHECK(reread.samples.size() == 8);
  CHECK(reread.samples[5].status == "augmented");
  CHECK(reread.samples[5].augmentation == aug.samples[5].augmentation);

  // Writing what was read reproduces identical files.
  write_dataset(reread, dir_b);
  for (const char* file : {"a.npy", "f.npy", "u.npy", "manifest.json"})
    CHECK(read_text(dir_a / file) == read_text(dir_b / file));

  std::filesystem::remove_all(dir_a);
  std::filesystem::remove_all(dir_b);
}

TEST_CASE("npy files on disk carry numpy metadata") {
  DatasetSpec spec = default_spec("elliptic_1d");
  spec.n_samples = 16;
  spec.master_seed = 0;
  const auto dir = temp_dir("covaug_npy_header");
  write_dataset(generate_dataset(spec), dir);

  const std::string header = read_text(dir / "u.npy").substr(0, 128);
  CHECK(header.substr(1, 5) == "NUMPY");
  CHECK(header.find("'descr': '<f8'") != std::string::npos);
  CHECK(header.find("'shape': (16, 100)") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("an empty dataset still writes a valid manifest") {
  DatasetSpec spec = default_spec("elliptic_1d");
  spec.n_samples = 0;
  const Dataset ds = generate_dataset(spec);
  const auto dir = temp_dir("covaug_empty");
  write_dataset(ds, dir);
  const Dataset reread = read_dataset(dir);
  CHECK(reread.spec.n_samples == 0);
  CHECK(reread.samples.empty());
  CHECK(reread.channels.size() == 3);
  CHECK(verify_dataset(reread).ok());
  std::filesystem::remove_all(dir);
}

TEST_CASE("sample views expose per-sample arrays") {
  DatasetSpec spec = default_spec("elliptic_1d");
  spec.n_samples = 3;
  spec.master_seed = 15;
  const Dataset ds = generate_dataset(spec);
  const Sample sample = get_sample(ds, 1);
  REQUIRE(sample.channels.size() == 3);
  CHECK(sample.channels[0].first == "a");
  CHECK(sample.channels[0].second.shape == std::vector<std::size_t>{100});
  CHECK(sample.channels[2].second.data[50] == ds.channel("u").rows(1, 50));
  CHECK(sample.provenance.at("status") == "solved");
  CHECK(sample.provenance.at("seed") == ds.samples[1].seed);
  CHECK_THROWS_AS(get_sample(ds, 3), std::invalid_argument);
}

TEST_CASE("the manifest names every channel file and shape") {
  DatasetSpec spec = default_spec("convdiff_1d");
  spec.n_samples = 2;
  spec.master_seed = 5;
  const nlohmann::json manifest = manifest_json(generate_dataset(spec));
  CHECK(manifest.at("spec").at("name") == "convdiff_1d");
  CHECK(manifest.at("spec").at("equation") == "convdiff");
  CHECK_FALSE(manifest.contains("augmentation"));
  REQUIRE(manifest.at("channels").size() == 4);
  const auto& phi = manifest.at("channels").back();
  CHECK(phi.at("name") == "phi");
  CHECK(phi.at("file") == "phi.npy");
  CHECK(phi.at("shape") == nlohmann::json::array({2, 200, 100}));
  CHECK(manifest.at("samples").size() == 2);
  CHECK_FALSE(manifest.at("samples")[0].contains("retries"));  // zero is elided
}

// ===========================================================================
// Input validation
// ===========================================================================

TEST_CASE("datasets validate their inputs") {
  DatasetSpec spec = default_spec("elliptic_1d");
  spec.dim = 3;
  CHECK_THROWS_AS(generate_dataset(spec), std::invalid_argument);

  spec = default_spec("elliptic_1d");
  spec.n = 2;
  CHECK_THROWS_AS(generate_dataset(spec), std::invalid_argument);

  spec = default_spec("convdiff_1d");
  spec.nt = 1;
  CHECK_THROWS_AS(generate_dataset(spec), std::invalid_argument);

  spec = default_spec("elliptic_1d");
  spec.n_samples = 2;
  const Dataset ds = generate_dataset(spec);
  CHECK_THROWS_AS(ds.channel("phi"), std::invalid_argument);
  AugmentOptions opt;
  opt.factor = -1;
  CHECK_THROWS_AS(augment_dataset(ds, opt), std::invalid_argument);

  CHECK_THROWS_AS(read_dataset(temp_dir("covaug_missing")), std::runtime_error);
}
