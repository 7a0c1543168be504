#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

namespace {

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun run(const std::string& args, const std::string& env = "") {
  std::string cmd = env + " " + DLAB_CLI_PATH + " " + args + " 2>/dev/null";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::filesystem::path scratch() {
  auto dir = std::filesystem::temp_directory_path() / "dlab_cli_test";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string write_matrix() {
  auto path = scratch() / "m.json";
  std::ofstream(path) << R"({"rows": [["1/3", {"quadratic": ["0", "1", "2"]}]]})";
  return path.string();
}

}  // namespace

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("--help").code, 0);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("psi --matrix").code, 2);
  EXPECT_EQ(run("nonsense").code, 2);
  EXPECT_EQ(run("psi --matrix " + write_matrix() + " --t abc").code, 2);
  EXPECT_EQ(run("seq --matrix " + write_matrix() + " --cap 100000 --budget 100").code, 3);
}

TEST(Cli, PsiIsDeterministicAndSchemaTagged) {
  const std::string m = write_matrix();
  CliRun a = run("psi --matrix " + m + " --t 200"), b = run("psi --matrix " + m + " --t 200");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  auto j = nlohmann::json::parse(a.out);
  EXPECT_EQ(j["schema"], 1);
  EXPECT_TRUE(j["result"]["psi"].contains("lo"));
}

TEST(Cli, SeqCsvHasSidecar) {
  const auto out = scratch() / "seq.csv";
  std::filesystem::remove(out);
  CliRun r = run("seq --matrix " + write_matrix() + " --cap 50 --out " + out.string());
  ASSERT_EQ(r.code, 0);
  std::ifstream in(out);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "v,b1,b2,b3,M_lo,M_hi,L_lo,L_hi\r");
  EXPECT_TRUE(std::filesystem::exists(out.string() + ".meta.json"));
}

TEST(Cli, ConstructThenSpectrum) {
  const auto state = scratch() / "state.json";
  CliRun c = run("construct --kind two-scale --c 1/5 --levels 6 --out " + state.string());
  ASSERT_EQ(c.code, 0);
  CliRun s = run("spectrum --state " + state.string() + " --cap 500");
  ASSERT_EQ(s.code, 0);
  auto j = nlohmann::json::parse(s.out);
  EXPECT_EQ(j["result"]["kind"], "two-scale");
  EXPECT_FALSE(j["result"]["records"].empty());
  // Tampering with the stored integers is caught by the digest.
  auto st = nlohmann::json::parse(std::ifstream(state));
  auto& data = st.contains("result") ? st["result"]["state"]["data"] : st["data"];
  data["degenerate"] = !data["degenerate"].get<bool>();
  std::ofstream(state) << st.dump();
  EXPECT_EQ(run("spectrum --state " + state.string() + " --cap 500").code, 4);
}

TEST(Cli, ConstantsCsv) {
  CliRun r = run("constants --cn 4..5 --format csv");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.substr(0, r.out.find('\r')), "n,cn_lo,cn_hi,gamma_form,ball_form,forms_agree");
}
