#include "kronlap/cli.hpp"
#include "kronlap/matrix_market.hpp"
#include "kronlap/poisson_bench.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

using namespace kronlap;
using namespace kronlap::testing;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class CliTest : public ::testing::Test {
protected:
    void SetUp() override
    {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / (std::string("kronlap_cli_") + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    int run(std::vector<std::string> args)
    {
        args.insert(args.begin(), "kronlap");
        out_.str("");
        err_.str("");
        return cli::run(args, out_, err_);
    }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    static json load_json(const std::string& p)
    {
        std::ifstream f(p);
        return json::parse(f);
    }

    static void expect_matrix(const json& j, const Mat& expected, double tol)
    {
        ASSERT_EQ(j.size(), static_cast<std::size_t>(expected.rows()));
        for (Eigen::Index i = 0; i < expected.rows(); ++i) {
            ASSERT_EQ(j[i].size(), static_cast<std::size_t>(expected.cols()));
            for (Eigen::Index k = 0; k < expected.cols(); ++k)
                EXPECT_NEAR(j[i][k].get<double>(), expected(i, k), tol) << "(" << i << "," << k << ")";
        }
    }

    fs::path dir_;
    std::ostringstream out_;
    std::ostringstream err_;
};

} // namespace

TEST_F(CliTest, DecomposeAdjacencyExample)
{
    write_matrix_market(path("A.mtx"), adjacency_matrix(), MatrixMarketLayout::coordinate);
    ASSERT_EQ(run({"decompose", "--input", path("A.mtx"), "--dims", "2,3", "--output", path("r.json")}), 0)
        << err_.str();
    const json r = load_json(path("r.json"));
    EXPECT_EQ(r["dims"], json::array({2, 3}));
    EXPECT_EQ(r["alpha"].get<double>(), 0.0);
    expect_matrix(r["factors"][0], adjacency_x1(), 0.0);
    expect_matrix(r["factors"][1], adjacency_x2(), 0.0);
    EXPECT_LE(r["residual_fro"].get<double>(), 1e-12);
    EXPECT_TRUE(r["is_member"].get<bool>());
    EXPECT_EQ(r["method"], "closed");
    for (const char* key : {"relative_residual", "tol", "sweeps_used", "threads"})
        EXPECT_TRUE(r.contains(key)) << key;
}

TEST_F(CliTest, DecomposeBlockExampleIterative)
{
    write_matrix_market(path("A.mtx"), block_matrix());
    ASSERT_EQ(run({"decompose", "--input", path("A.mtx"), "--dims", "2,3,5", "--method", "iterative", "--output",
                   path("r.json")}),
              0)
        << err_.str();
    const json r = load_json(path("r.json"));
    EXPECT_NEAR(r["alpha"].get<double>(), 5.0 / 3.0, 1e-12);
    expect_matrix(r["factors"][0], block_x1(), 1e-12);
    expect_matrix(r["factors"][1], block_x2(), 1e-12);
    expect_matrix(r["factors"][2], block_x3_from_blocks(), 1e-12);
    EXPECT_LE(r["residual_fro"].get<double>(), 1e-10);
    EXPECT_EQ(r["method"], "iterative");
    EXPECT_GE(r["sweeps_used"].get<int>(), 1);
}

TEST_F(CliTest, DecomposeRejectsMismatchedDims)
{
    write_matrix_market(path("A.mtx"), adjacency_matrix());
    EXPECT_EQ(run({"decompose", "--input", path("A.mtx"), "--dims", "4,2", "--output", path("r.json")}), 2);
    EXPECT_NE(err_.str().find("N=8"), std::string::npos) << err_.str();
    EXPECT_FALSE(fs::exists(path("r.json")));
    EXPECT_EQ(run({"decompose", "--input", path("A.mtx"), "--dims", "6,1", "--output", path("r.json")}), 2);
    EXPECT_EQ(run({"decompose", "--input", path("A.mtx"), "--dims", "2,3", "--method", "magic", "--output",
                   path("r.json")}),
              2);
}

TEST_F(CliTest, MissingAndMalformedInputsAreIoErrors)
{
    EXPECT_EQ(run({"decompose", "--input", path("none.mtx"), "--dims", "2,3", "--output", path("r.json")}), 1);
    {
        std::ofstream f(path("bad.mtx"));
        f << "%%MatrixMarket matrix array real general\n6 6\n1\n";
    }
    EXPECT_EQ(run({"decompose", "--input", path("bad.mtx"), "--dims", "2,3", "--output", path("r.json")}), 1);
    EXPECT_NE(err_.str().find("bad.mtx:"), std::string::npos) << err_.str();
    EXPECT_FALSE(fs::exists(path("r.json")));
}

TEST_F(CliTest, UsageErrorsExitWithValidationCode)
{
    EXPECT_EQ(run({}), 2);
    EXPECT_EQ(run({"frobnicate"}), 2);
    EXPECT_EQ(run({"solve", "--matrix", path("A.mtx")}), 2);
    EXPECT_EQ(run({"--help"}), 0);
    EXPECT_NE(out_.str().find("decompose"), std::string::npos);
}

TEST_F(CliTest, SolveIdentitySystem)
{
    write_matrix_market(path("A.mtx"), Mat::Identity(6, 6));
    Vec b(6);
    b << 2, 0.5, 1, -2, -0.5, -1;
    write_vector_market(path("b.mtx"), b);
    ASSERT_EQ(run({"solve", "--matrix", path("A.mtx"), "--rhs", path("b.mtx"), "--dims", "2,3", "--output",
                   path("x.mtx")}),
              0)
        << err_.str();
    EXPECT_LT((read_vector_market(path("x.mtx")) - b).norm(), 1e-10);
    const json r = load_json(path("x.mtx.json"));
    EXPECT_EQ(r["terms_used"], 1);
    EXPECT_EQ(r["operator_kind"], "laplacian");
    EXPECT_EQ(r["stop_reason"], "residual_below_eps");
    for (const char* key : {"dims", "method", "residual_history", "final_residual", "relative_residual", "threads"})
        EXPECT_TRUE(r.contains(key)) << key;
}

TEST_F(CliTest, SolveGeneratedPoissonProblem)
{
    ASSERT_EQ(run({"gen", "--kind", "poisson", "--n", "4", "--output", path("p")}), 0) << err_.str();
    ASSERT_EQ(run({"solve", "--matrix", path("p/A.mtx"), "--rhs", path("p/b.mtx"), "--dims", "4,4,4", "--output",
                   path("x.mtx"), "--report", path("rep.json")}),
              0)
        << err_.str();
    const Mat a = read_matrix_market(path("p/A.mtx"));
    const Vec b = read_vector_market(path("p/b.mtx"));
    const Vec x = read_vector_market(path("x.mtx"));
    const Vec direct = a.partialPivLu().solve(b);
    EXPECT_LE((x - direct).cwiseAbs().maxCoeff() / direct.cwiseAbs().maxCoeff(), 1e-4);
    const json r = load_json(path("rep.json"));
    EXPECT_EQ(r["operator_kind"], "laplacian");
    EXPECT_LE(r["relative_residual"].get<double>(), 1e-5);
    EXPECT_FALSE(fs::exists(path("x.mtx.json")));
}

TEST_F(CliTest, SolveDenseAndDirectPaths)
{
    std::mt19937_64 rng(21);
    const Mat a = random_matrix(rng, 6, 6) + 6 * Mat::Identity(6, 6);
    const Vec b = random_vector(rng, 6);
    write_matrix_market(path("A.mtx"), a);
    write_vector_market(path("b.mtx"), b);

    ASSERT_EQ(run({"solve", "--matrix", path("A.mtx"), "--rhs", path("b.mtx"), "--dims", "2,3", "--eps", "1e-9",
                   "--tol", "1e-15", "--output", path("x.mtx")}),
              0)
        << err_.str();
    EXPECT_EQ(load_json(path("x.mtx.json"))["operator_kind"], "dense");

    ASSERT_EQ(run({"solve", "--matrix", path("A.mtx"), "--rhs", path("b.mtx"), "--dims", "2,3", "--method", "direct",
                   "--output", path("d.mtx")}),
              0);
    EXPECT_LT((a * read_vector_market(path("d.mtx")) - b).norm(), 1e-12);
    const json r = load_json(path("d.mtx.json"));
    EXPECT_EQ(r["stop_reason"], "direct_solve");
    EXPECT_EQ(r["terms_used"], 0);
}

TEST_F(CliTest, SingularDirectSolveIsNumericalError)
{
    write_matrix_market(path("A.mtx"), Mat::Ones(6, 6));
    write_vector_market(path("b.mtx"), Vec::Ones(6));
    EXPECT_EQ(run({"solve", "--matrix", path("A.mtx"), "--rhs", path("b.mtx"), "--dims", "2,3", "--method", "direct",
                   "--output", path("x.mtx")}),
              3);
    EXPECT_FALSE(fs::exists(path("x.mtx")));
    EXPECT_FALSE(fs::exists(path("x.mtx.json")));
}

TEST_F(CliTest, SolveRejectsBadParameters)
{
    write_matrix_market(path("A.mtx"), Mat::Identity(6, 6));
    write_vector_market(path("b.mtx"), Vec::Ones(5));
    EXPECT_EQ(run({"solve", "--matrix", path("A.mtx"), "--rhs", path("b.mtx"), "--dims", "2,3", "--output",
                   path("x.mtx")}),
              2);
    write_vector_market(path("b.mtx"), Vec::Ones(6));
    EXPECT_EQ(run({"solve", "--matrix", path("A.mtx"), "--rhs", path("b.mtx"), "--dims", "2,3", "--eps", "0",
                   "--output", path("x.mtx")}),
              2);
    EXPECT_EQ(run({"solve", "--matrix", path("A.mtx"), "--rhs", path("b.mtx"), "--dims", "2,3", "--rank-max", "0",
                   "--output", path("x.mtx")}),
              2);
    EXPECT_FALSE(fs::exists(path("x.mtx")));
}

TEST_F(CliTest, GenIsDeterministic)
{
    for (const char* kind : {"laplacian", "dense"}) {
        ASSERT_EQ(run({"gen", "--kind", kind, "--dims", "2,3", "--seed", "5", "--output", path("a.mtx"), "--rhs",
                       path("b.mtx")}),
                  0);
        ASSERT_EQ(run({"gen", "--kind", kind, "--dims", "2,3", "--seed", "5", "--output", path("c.mtx")}), 0);
        ASSERT_EQ(run({"gen", "--kind", kind, "--dims", "2,3", "--seed", "6", "--output", path("d.mtx")}), 0);
        EXPECT_EQ(read_matrix_market(path("a.mtx")), read_matrix_market(path("c.mtx"))) << kind;
        EXPECT_NE(read_matrix_market(path("a.mtx")), read_matrix_market(path("d.mtx"))) << kind;
        EXPECT_EQ(read_vector_market(path("b.mtx")).size(), 6);
    }
    EXPECT_EQ(run({"gen", "--kind", "sparse", "--dims", "2,3", "--output", path("e.mtx")}), 2);
    EXPECT_EQ(run({"gen", "--kind", "poisson", "--n", "1", "--output", path("p")}), 2);
}

TEST_F(CliTest, GeneratedLaplacianIsDetectedAsMember)
{
    ASSERT_EQ(run({"gen", "--kind", "laplacian", "--dims", "2,3,2", "--seed", "1", "--output", path("a.mtx")}), 0);
    ASSERT_EQ(run({"decompose", "--input", path("a.mtx"), "--dims", "2,3,2", "--output", path("r.json")}), 0);
    EXPECT_TRUE(load_json(path("r.json"))["is_member"].get<bool>());

    ASSERT_EQ(run({"gen", "--kind", "dense", "--dims", "2,3,2", "--seed", "1", "--output", path("d.mtx")}), 0);
    ASSERT_EQ(run({"decompose", "--input", path("d.mtx"), "--dims", "2,3,2", "--output", path("s.json")}), 0);
    EXPECT_FALSE(load_json(path("s.json"))["is_member"].get<bool>());
}

TEST_F(CliTest, GenPoissonMatchesStencilSum)
{
    ASSERT_EQ(run({"gen", "--kind", "poisson", "--n", "3", "--output", path("p")}), 0) << err_.str();
    const Mat a = read_matrix_market(path("p/A.mtx"));
    const std::vector<std::size_t> dims{3, 3, 3};
    const Mat s = poisson1d_stencil(3, 0.25);
    const Mat expected = embed_by_kron_chain(0, s, dims) + embed_by_kron_chain(1, s, dims)
                         + embed_by_kron_chain(2, s, dims);
    EXPECT_LT((a - expected).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_EQ(read_vector_market(path("p/b.mtx")).size(), 27);
    EXPECT_EQ(read_vector_market(path("p/exact.mtx")).size(), 27);
}

TEST_F(CliTest, BenchWritesCsv)
{
    ASSERT_EQ(run({"bench", "poisson", "--sizes", "3,4", "--repeats", "1", "--output", path("b.csv")}), 0)
        << err_.str();
    std::ifstream f(path("b.csv"));
    const std::string csv((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    EXPECT_EQ(csv.rfind("n,N,method,seconds,rel_residual,terms\n", 0), 0u);
    EXPECT_NE(csv.find("\n3,27,grou,"), std::string::npos);
    EXPECT_NE(csv.find("\n4,64,direct,"), std::string::npos);
    EXPECT_EQ(csv, out_.str());
    EXPECT_EQ(run({"bench", "poisson", "--sizes", "3,x", "--output", path("c.csv")}), 2);
    EXPECT_EQ(run({"bench", "heat", "--sizes", "3", "--output", path("c.csv")}), 2);
    EXPECT_FALSE(fs::exists(path("c.csv")));
}

TEST_F(CliTest, DenseCapFromEnvironment)
{
    ::setenv("KRONLAP_DENSE_CAP", "10", 1);
    const int code = run({"gen", "--kind", "dense", "--dims", "3,4", "--output", path("a.mtx")});
    ::unsetenv("KRONLAP_DENSE_CAP");
    EXPECT_EQ(code, 2);
    EXPECT_FALSE(fs::exists(path("a.mtx")));
}
