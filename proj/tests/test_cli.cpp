#include <catch2/catch.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tomokit/io.hpp"

using namespace tomokit;
using Catch::Detail::Approx;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit_code;
  std::string out;
};

fs::path work_dir() {
  fs::path d = fs::temp_directory_path() / "tomokit_cli_test";
  fs::create_directories(d);
  return d;
}

CliResult run_cli(const std::string& args, const std::string& env = "") {
  fs::path out_file = work_dir() / "stdout.txt";
  std::string cmd = (env.empty() ? "" : env + " ") + std::string(TOMOKIT_BIN) + " " + args +
                    " > " + out_file.string() + " 2>&1";
  int rc = std::system(cmd.c_str());
  int code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  std::ifstream in(out_file);
  std::stringstream ss;
  ss << in.rdbuf();
  return {code, ss.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("cli tomogram writes analytic Gaussian marginals") {
  fs::path out = work_dir() / "vac.csv";
  CliResult r = run_cli("tomogram --state gaussian --sigma 0.5,0,0.5 "
                        "--theta-count 2 --theta-min 0 --theta-max 1.5707963267948966 "
                        "--out " + out.string());
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("residual=") != std::string::npos);
  SampledTomogram t = read_tomogram(out);
  REQUIRE(t.frames.size() == 2);
  CHECK(t.frames[0].mu == Approx(1.0));
  CHECK(t.frames[1].nu == Approx(1.0));
  for (int m = 0; m < 2; ++m)
    CHECK(t.slice_integral(m) == Approx(1.0).margin(1e-6));
}

TEST_CASE("cli tomogram from a grid file matches the analytic path") {
  auto g = make_gaussian_grid(GaussianState::vacuum(), GridSpec::standard());
  fs::path grid_path = work_dir() / "vac_grid.txt";
  write_phasegrid(grid_path, g);

  fs::path out_grid = work_dir() / "tomo_grid.csv";
  fs::path out_analytic = work_dir() / "tomo_analytic.csv";
  REQUIRE(run_cli("tomogram --state grid --input " + grid_path.string() +
                  " --theta-count 3 --out " + out_grid.string()).exit_code == 0);
  REQUIRE(run_cli("tomogram --state gaussian --sigma 0.5,0,0.5 --theta-count 3 --out " +
                  out_analytic.string()).exit_code == 0);

  SampledTomogram a = read_tomogram(out_grid);
  SampledTomogram b = read_tomogram(out_analytic);
  REQUIRE(a.n_x == b.n_x);
  CHECK((a.values - b.values).cwiseAbs().maxCoeff() < 1e-3);
}

TEST_CASE("cli rejects a malformed frame file with exit 2") {
  fs::path frames = work_dir() / "bad_frames.txt";
  {
    std::ofstream out(frames);
    out << "1 0\nnot-a-number 1\n";
  }
  CliResult r = run_cli("tomogram --state gaussian --frames " + frames.string() +
                        " --out " + (work_dir() / "x.csv").string());
  CHECK(r.exit_code == 2);
  CHECK(r.out.find("error:") != std::string::npos);
}

TEST_CASE("cli invert round trips the vacuum") {
  auto g = make_gaussian_grid(GaussianState::vacuum(),
                              GridSpec::symmetric(8, 8, 257, 257));
  fs::path ref_path = work_dir() / "vac_ref.txt";
  write_phasegrid(ref_path, g);

  fs::path tomo_path = work_dir() / "vac_tomo.csv";
  REQUIRE(run_cli("tomogram --state gaussian --sigma 0.5,0,0.5 --theta-count 48 "
                  "--theta-max 3.0761863374588208 --nx 257 --out " +
                  tomo_path.string()).exit_code == 0);

  fs::path rec_path = work_dir() / "vac_rec.txt";
  CliResult r = run_cli("invert --input " + tomo_path.string() + " --out " +
                        rec_path.string() + " --reference " + ref_path.string());
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("reference_l1:") != std::string::npos);
  CHECK(r.out.find("status:               ok") != std::string::npos);
  PhaseGrid rec = read_phasegrid(rec_path);
  CHECK(rec.mass() == Approx(1.0).margin(1e-9));
}

TEST_CASE("cli invert reports missing angular coverage with exit 3") {
  fs::path tomo_path = work_dir() / "narrow.csv";
  REQUIRE(run_cli("tomogram --state gaussian --sigma 0.5,0,0.5 --theta-count 8 "
                  "--theta-min 0 --theta-max 0.5 --out " + tomo_path.string())
              .exit_code == 0);
  CliResult r = run_cli("invert --input " + tomo_path.string() + " --out " +
                        (work_dir() / "narrow_rec.txt").string());
  CHECK(r.exit_code == 3);
}

TEST_CASE("cli classify labels the canonical states") {
  CliResult vac = run_cli("classify --state gaussian --sigma 0.5,0,0.5 --dim 48 --grid-n 193");
  REQUIRE(vac.exit_code == 0);
  CHECK(vac.out.find("quadrant:             both") != std::string::npos);

  CliResult fock = run_cli("classify --state fock --level 1 --dim 48 --grid-n 193");
  REQUIRE(fock.exit_code == 0);
  CHECK(fock.out.find("quadrant:             quantum-only") != std::string::npos);

  CliResult sq = run_cli("classify --state gaussian --sigma 0.1,0,0.1 --dim 48 --grid-n 193");
  REQUIRE(sq.exit_code == 0);
  CHECK(sq.out.find("quadrant:             classical-only") != std::string::npos);
  CHECK(sq.out.find("uncertainty_passes:   false") != std::string::npos);
}

TEST_CASE("cli classify writes a machine-readable JSON report") {
  fs::path json_path = work_dir() / "rep.json";
  CliResult r = run_cli("classify --state gaussian --sigma 0.1,0,0.1 --dim 48 --grid-n 193 "
                        "--json " + json_path.string());
  REQUIRE(r.exit_code == 0);
  std::string body = slurp(json_path);
  CHECK(body.find("\"quadrant\": \"classical-only\"") != std::string::npos);
  CHECK(body.find("\"classical_admissible\": true") != std::string::npos);
  CHECK(body.find("\"quantum_admissible\": false") != std::string::npos);
}

TEST_CASE("cli output is deterministic") {
  fs::path a = work_dir() / "det_a.csv";
  fs::path b = work_dir() / "det_b.csv";
  std::string args = "tomogram --state gaussian --sigma 0.7,0.1,0.9 --theta-count 5 --out ";
  REQUIRE(run_cli(args + a.string()).exit_code == 0);
  REQUIRE(run_cli(args + b.string()).exit_code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(fnv1a_hex(slurp(a)) == fnv1a_hex(slurp(b)));
}

TEST_CASE("cli scan hbar emits one verified row per value") {
  fs::path out = work_dir() / "scan.csv";
  CliResult r = run_cli("scan hbar --values 1,0.25 --dim 48 --grid-n 193 --out " +
                        out.string());
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("sets_never_coincide:  true") != std::string::npos);
  std::string csv = slurp(out);
  CHECK(csv.find("classical-only") != std::string::npos);
  CHECK(csv.find("quantum-only") != std::string::npos);

  CliResult bad = run_cli("scan hbar --values 0.1,1 --out " + out.string());
  CHECK(bad.exit_code == 2);
  CliResult empty = run_cli("scan hbar --values , --out " + out.string());
  CHECK(empty.exit_code == 2);
}

TEST_CASE("cli strict truncation escalates to exit 3") {
  // a hot thermal state in a basis far too small to hold it
  std::string args = "classify --state gaussian --sigma 5,0,5 --dim 8 --grid-n 193 "
                     "--window 20";
  CliResult plain = run_cli(args);
  CHECK(plain.exit_code == 0);
  CHECK(plain.out.find("warnings:             truncation") != std::string::npos);
  CliResult strict = run_cli(args + " --strict-truncation");
  CHECK(strict.exit_code == 3);
}

TEST_CASE("TOMOKIT_MAX_DIM caps the basis truncation") {
  CliResult r = run_cli("classify --state gaussian --sigma 0.5,0,0.5 --dim 64 --grid-n 129",
                        "TOMOKIT_MAX_DIM=24");
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("dim clamped to TOMOKIT_MAX_DIM=24") != std::string::npos);
  CHECK(r.out.find("quadrant:             both") != std::string::npos);
}

TEST_CASE("cli scan cross emits the verdict lattice") {
  fs::path out = work_dir() / "cross.csv";
  CliResult r = run_cli("scan cross --count 5 --range 2 --out " + out.string());
  REQUIRE(r.exit_code == 0);
  std::string csv = slurp(out);
  int lines = static_cast<int>(std::count(csv.begin(), csv.end(), '\n'));
  CHECK(lines == 1 + 25);
  // axis points belong to the degenerate classical cross
  CHECK(csv.find("0,0,false,false,false,nan") != std::string::npos);

  CliResult bad = run_cli("scan cross --count 1 --out " + out.string());
  CHECK(bad.exit_code == 2);
}
