#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace std;
namespace fs = std::filesystem;

namespace {

string cli_path() {
    const char* p = getenv("RESVORT_CLI");
    REQUIRE_MESSAGE(p != nullptr, "RESVORT_CLI must point at the CLI binary");
    return p;
}

int run(const string& args) {
    const string cmd = cli_path() + " " + args + " >/dev/null 2>&1";
    const int rc = system(cmd.c_str());
    return WEXITSTATUS(rc);
}

string slurp(const fs::path& p) {
    ifstream in(p, ios::binary);
    stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path sandbox(const string& name) {
    const fs::path dir = fs::temp_directory_path() / ("resvort_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write(const fs::path& p, const string& s) {
    ofstream out(p, ios::binary);
    out << s;
}

}  // namespace

TEST_CASE("resonance command emits the stable-state row") {
    const fs::path dir = sandbox("resonance");
    write(dir / "run.cfg",
          "[model]\nfield = 0.1555\nbinding_energy = -6.4\n"
          "[seeds]\nvalues = 6.9\nim = -0.001\n");
    const int rc = run("resonance --config " + (dir / "run.cfg").string() + " --out " +
                       dir.string());
    CHECK(rc == 0);
    const string table = slurp(dir / "resonance.csv");
    REQUIRE(!table.empty());
    // one data row: field, re, im, ...
    istringstream ss(table);
    string line, data;
    while (getline(ss, line))
        if (!line.empty() && line[0] != '#') data = line;
    double field = 0, re = 0, im = 0;
    sscanf(data.c_str(), "%lf,%lf,%lf", &field, &re, &im);
    CHECK(field == doctest::Approx(0.1555));
    CHECK(std::abs(im) < 1e-3);
    CHECK(re == doctest::Approx(7.0241791).epsilon(1e-5));
    CHECK(fs::exists(dir / "manifest.json"));
}

TEST_CASE("config failures exit with code 2") {
    const fs::path dir = sandbox("badcfg");
    write(dir / "bad.cfg", "[model]\nfield = 0.1\nnot_a_key = 1\n");
    CHECK(run("resonance --config " + (dir / "bad.cfg").string() + " --out " + dir.string()) ==
          2);
    write(dir / "empty_seeds.cfg", "[model]\nfield = 0.1555\nbinding_energy = -6.4\n"
                                   "[seeds]\nvalues =\n");
    CHECK(run("resonance --config " + (dir / "empty_seeds.cfg").string() + " --out " +
              dir.string()) == 2);
    CHECK(run("resonance --out " + dir.string()) == 2);  // missing --config
}

TEST_CASE("sweep emits raw and display-transformed series") {
    const fs::path dir = sandbox("sweep");
    write(dir / "run.cfg",
          "[model]\nfield = 0.15\nbinding_energy = -6.4\n"
          "[seeds]\nvalues = 7.02\nim = -1e-4\n"
          "[sweep]\nfield_min = 0.14\nfield_max = 0.17\ninitial_step = 0.005\nmax_step = 0.01\n");
    CHECK(run("sweep --config " + (dir / "run.cfg").string() + " --out " + dir.string()) == 0);
    const string raw = slurp(dir / "sweep_0.csv");
    const string fig = slurp(dir / "sweep_fig2_0.csv");
    REQUIRE(!raw.empty());
    REQUIRE(!fig.empty());

    // transform file is the pointwise transform of the raw file
    istringstream rs(raw), fgs(fig);
    string rl, fl;
    while (getline(rs, rl) && getline(fgs, fl)) {
        if (rl.empty() || rl[0] == '#') continue;
        double f1, re1, im1, f2, re2, t2;
        sscanf(rl.c_str(), "%lf,%lf,%lf", &f1, &re1, &im1);
        sscanf(fl.c_str(), "%lf,%lf,%lf", &f2, &re2, &t2);
        CHECK(f1 == f2);
        const double want = (im1 < 0 ? -1.0 : 1.0) * pow(std::abs(im1), 0.2);
        CHECK(t2 == doctest::Approx(want).epsilon(1e-6));
    }
}

TEST_CASE("identical config and version give byte-identical output") {
    const fs::path d1 = sandbox("det1"), d2 = sandbox("det2");
    const string cfg =
        "[model]\nfield = 0.1555\nbinding_energy = -6.4\n"
        "[seeds]\nvalues = 7.0226\nim = -1e-5\n";
    write(d1 / "run.cfg", cfg);
    write(d2 / "run.cfg", cfg);
    CHECK(run("resonance --config " + (d1 / "run.cfg").string() + " --out " + d1.string()) == 0);
    CHECK(run("resonance --config " + (d2 / "run.cfg").string() + " --out " + d2.string()) == 0);
    CHECK(slurp(d1 / "resonance.csv") == slurp(d2 / "resonance.csv"));
    CHECK(!slurp(d1 / "resonance.csv").empty());
}

TEST_CASE("vortices command on an empty window returns an empty table and exit 0") {
    const fs::path dir = sandbox("novort");
    // all zeros of the stable state sit on the axis; this window avoids it
    write(dir / "run.cfg",
          "[model]\nfield = 0.1555\nbinding_energy = -6.4\n"
          "[seeds]\nvalues = 7.0226\nim = -1e-5\n"
          "[window]\nxmin = 1.2\nxmax = 3\nymin = 1\nymax = 3\nnx = 31\nny = 31\n"
          "[sweep]\nfield_min = 0.154\nfield_max = 0.156\ninitial_step = 0.001\n");
    CHECK(run("vortices --config " + (dir / "run.cfg").string() + " --out " + dir.string()) ==
          0);
    const string table = slurp(dir / "vortices.csv");
    int rows = 0;
    istringstream ss(table);
    string line;
    while (getline(ss, line))
        if (!line.empty() && line[0] != '#') ++rows;
    CHECK(rows == 0);
}
