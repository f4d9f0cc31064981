#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "mmkit/io.hpp"
#include "support/fixtures.hpp"

// Process-level contract tests: each case spawns the built binary, captures
// stdout, and checks the documented exit codes and byte-determinism.

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int exit_code;
  std::string out;
};

RunResult run(const std::string& args) {
  std::string cmd = std::string(MMKIT_CLI_PATH) + " " + args + " 2>/dev/null";
  std::array<char, 4096> buffer{};
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::size_t n;
  while ((n = fread(buffer.data(), 1, buffer.size(), pipe)) > 0)
    r.out.append(buffer.data(), n);
  int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class Workspace {
 public:
  Workspace() {
    dir_ = fs::temp_directory_path() /
           ("mmkit_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
    write("X.json", fixtures::space_x());
    write("Y.json", fixtures::space_y());
    write("Z.json", fixtures::space_z());
    write("W.json", fixtures::space_w());
    write("pt.json", mmkit::one_point_space());
  }
  ~Workspace() { fs::remove_all(dir_); }

  void write(const std::string& name, const mmkit::MMSpace& s) {
    std::ofstream out(dir_ / name);
    out << mmkit::dump_json(mmkit::to_json(mmkit::document_from_space(
        name.substr(0, name.find('.')), s)));
  }

  void write_text(const std::string& name, const std::string& text) {
    std::ofstream out(dir_ / name);
    out << text;
  }

  std::string path(const std::string& name) const {
    return (dir_ / name).string();
  }

 private:
  fs::path dir_;
};

}  // namespace

TEST_CASE("order check on the fixture emits a valid map certificate") {
  Workspace ws;
  RunResult r = run("order check " + ws.path("X.json") + " " + ws.path("Z.json"));
  REQUIRE(r.exit_code == 0);
  mmkit::Json cert = mmkit::Json::parse(r.out);
  CHECK(cert["kind"] == "map");
  CHECK(cert["valid"] == true);
  CHECK(cert["payload"]["f"] == mmkit::Json::array({0, 1, 1}));
}

TEST_CASE("box of a space with itself reports value 0") {
  Workspace ws;
  RunResult r = run("box " + ws.path("Z.json") + " " + ws.path("Z.json"));
  REQUIRE(r.exit_code == 0);
  mmkit::Json cert = mmkit::Json::parse(r.out);
  CHECK(cert["payload"]["value"] == "0");
}

TEST_CASE("non-domination is a definitive exit 1") {
  Workspace ws;
  RunResult r = run("order check " + ws.path("pt.json") + " " + ws.path("Z.json"));
  CHECK(r.exit_code == 1);
  mmkit::Json j = mmkit::Json::parse(r.out);
  CHECK(j["result"] == "none");
}

TEST_CASE("guard-limited searches exit 2, never 1") {
  Workspace ws;
  std::string cmd = "MMKIT_GUARD_DOMINATION_SOURCE=1 " +
                    std::string(MMKIT_CLI_PATH) + " order check " +
                    ws.path("X.json") + " " + ws.path("Z.json") +
                    " 2>/dev/null; echo $?";
  std::array<char, 256> buffer{};
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::size_t n;
  while ((n = fread(buffer.data(), 1, buffer.size(), pipe)) > 0)
    out.append(buffer.data(), n);
  pclose(pipe);
  CHECK(out.find("2") != std::string::npos);
}

TEST_CASE("bad input exits 2 with an error code") {
  Workspace ws;
  ws.write_text("broken.json", "{\"name\": \"broken\"");
  RunResult r = run("box " + ws.path("broken.json") + " " + ws.path("Z.json"));
  CHECK(r.exit_code == 2);
}

TEST_CASE("emitted certificates verify in a fresh process") {
  Workspace ws;
  for (const std::string& cmd :
       {std::string("order check ") + ws.path("X.json") + " " + ws.path("Z.json"),
        std::string("order eps ") + ws.path("X.json") + " " + ws.path("Z.json") +
            " --eps 1/4",
        std::string("box ") + ws.path("Z.json") + " " + ws.path("W.json"),
        std::string("gh ") + ws.path("X.json") + " " + ws.path("Z.json"),
        std::string("prohorov ") + ws.path("X.json") + " --mu mass --nu mass",
        std::string("construct glue ") + ws.path("Z.json") + " " + ws.path("W.json"),
        std::string("construct quotient ") + ws.path("X.json") + " " +
            ws.path("Z.json") + " " + ws.path("W.json"),
        std::string("pipeline dominate --family ") + ws.path("Z.json") + " " +
            ws.path("W.json") + " --schedule 1/2,1/4 --mode ambient --ambient " +
            ws.path("X.json")}) {
    RunResult made = run(cmd);
    REQUIRE(made.exit_code == 0);
    ws.write_text("cert.json", made.out);
    RunResult verified = run("verify " + ws.path("cert.json"));
    INFO(cmd);
    CHECK(verified.exit_code == 0);
  }
}

TEST_CASE("verify cross-checks against replacement spaces") {
  Workspace ws;
  RunResult made =
      run("order check " + ws.path("X.json") + " " + ws.path("Z.json"));
  REQUIRE(made.exit_code == 0);
  ws.write_text("cert.json", made.out);
  RunResult ok = run("verify " + ws.path("cert.json") + " --spaces " +
                     ws.path("X.json") + " " + ws.path("Z.json"));
  CHECK(ok.exit_code == 0);
  // Pointing at the wrong spaces must fail verification.
  RunResult bad = run("verify " + ws.path("cert.json") + " --spaces " +
                      ws.path("Y.json") + " " + ws.path("Z.json"));
  CHECK(bad.exit_code == 1);
}

TEST_CASE("output is byte-deterministic across runs") {
  Workspace ws;
  std::string cmd = "pipeline dominate --family " + ws.path("Z.json") + " " +
                    ws.path("W.json") +
                    " --schedule 1/2,1/4 --mode ambient --ambient " +
                    ws.path("X.json");
  RunResult a = run(cmd);
  RunResult b = run(cmd);
  REQUIRE(a.exit_code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("fixture dominations hold against both X and Y") {
  Workspace ws;
  for (const auto& [upper, lower] :
       {std::pair{"X.json", "Z.json"}, std::pair{"X.json", "W.json"},
        std::pair{"Y.json", "Z.json"}, std::pair{"Y.json", "W.json"}}) {
    RunResult r = run("order check " + ws.path(upper) + " " + ws.path(lower));
    INFO(upper << " > " << lower);
    CHECK(r.exit_code == 0);
  }
}
