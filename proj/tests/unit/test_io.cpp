#include "helpers.hpp"

#include "fockdil/instances.hpp"
#include "fockdil/io.hpp"

#include <cstdio>
#include <fstream>

using namespace fockdil;
using testing_support::rng_for;

TEST_CASE("matrices, tuples and symbols roundtrip exactly") {
    Rng rng = rng_for(90);
    const CMat M = random_gaussian(3, 2, rng);
    CHECK((matrix_from_json(matrix_to_json(M)) - M).norm() == 0.0);
    // Plain reals are accepted as entries.
    const CMat R = matrix_from_json(json::parse("[[1, 2.5], [-3, 0]]"));
    CHECK(R(0, 1) == cplx(2.5, 0.0));
    CHECK(R(1, 0) == cplx(-3.0, 0.0));

    const OperatorTuple T = random_row_contraction(3, 2, rng);
    const OperatorTuple T2 = tuple_from_json(json::parse(dump_json(tuple_to_json(T))));
    for (int i = 0; i < 3; ++i) CHECK((T2[i] - T[i]).norm() == 0.0);
    CHECK(tuple_from_json(tuple_to_json(OperatorTuple::empty(2))).dim() == 0);

    MultiAnalyticSymbol s(2, 2, 2, 1);
    s.set({}, random_gaussian(1, 2, rng));
    s.set({2, 1}, random_gaussian(1, 2, rng));
    const json js = symbol_to_json(s);
    CHECK(js.at("coeffs").size() == 2);
    CHECK(js.at("coeffs")[1].at("word") == "2.1");
    const MultiAnalyticSymbol s2 = symbol_from_json(json::parse(dump_json(js)));
    CHECK((s2.stacked() - s.stacked()).norm() == 0.0);
}

TEST_CASE("liftings roundtrip through their parts") {
    Rng rng = rng_for(91);
    const Lifting L = random_reduced_lifting(2, 2, 3, rng);
    const LiftingParts p = lifting_parts_from_json(json::parse(dump_json(lifting_to_json(L))));
    for (int i = 0; i < 2; ++i) {
        CHECK((p.C[i] - L.C[i]).norm() == 0.0);
        CHECK((p.A[i] - L.A[i]).norm() == 0.0);
        CHECK((p.B[static_cast<size_t>(i)] - L.B[static_cast<size_t>(i)]).norm() == 0.0);
    }
    const Lifting trivial = lift_from_gamma(L.C, OperatorTuple::empty(2), CMat::Zero(L.defC.defect.dim(), 0));
    const LiftingParts q = lifting_parts_from_json(lifting_to_json(trivial));
    CHECK(q.A.dim() == 0);
    CHECK(q.B.size() == 2);
}

TEST_CASE("FNV-1a reference values") {
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
    CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("report serialisation is deterministic") {
    json a;
    a["zeta"] = 0.1;
    a["alpha"] = json::array({1.0 / 3.0, 2});
    a["nested"] = json{{"b", true}, {"a", "x"}};
    json b;
    b["nested"] = json{{"a", "x"}, {"b", true}};
    b["alpha"] = json::array({1.0 / 3.0, 2});
    b["zeta"] = 0.1;
    const std::string sa = dump_json(a), sb = dump_json(b);
    CHECK(sa == sb);
    CHECK(sa.find("0.33333333333333331") != std::string::npos);
    CHECK(sa.find("\"alpha\"") < sa.find("\"nested\""));
    // Full precision survives a parse.
    CHECK(json::parse(sa).at("alpha")[0].get<double>() == 1.0 / 3.0);
    CHECK(dump_json(json{{"x", std::numeric_limits<double>::infinity()}}, 0) == "{\"x\":\"inf\"}");
}

TEST_CASE("malformed input raises InputError") {
    CHECK_THROWS_AS(tuple_from_json(json::parse("{\"d\": 2}")), InputError);
    CHECK_THROWS_AS(tuple_from_json(json::parse("{\"d\": 2, \"dim\": 2, \"mats\": [[[1,0],[0,1]]]}")), InputError);
    CHECK_THROWS_AS(tuple_from_json(json::parse("{\"d\": 1, \"dim\": 2, \"mats\": [[[1,0],[0]]]}")), InputError);
    CHECK_THROWS_AS(tuple_from_json(json::parse("{\"d\": 1, \"dim\": 1, \"mats\": [[[\"x\"]]]}")), InputError);
    CHECK_THROWS_AS(matrix_from_json(json::parse("3")), InputError);
    const std::string head = "{\"d\": 2, \"N\": 1, \"dom_dim\": 1, \"cod_dim\": 1, \"coeffs\": ";
    CHECK_THROWS_AS(symbol_from_json(json::parse(head + "[{\"word\": \"3\", \"matrix\": [[1]]}]}")), InputError);
    CHECK_THROWS_AS(symbol_from_json(json::parse(head + "[{\"word\": \"1.1\", \"matrix\": [[1]]}]}")), InputError);
    CHECK_THROWS_AS(symbol_from_json(json::parse(head + "[{\"word\": \"1\", \"matrix\": [[1, 2]]}]}")), InputError);
    CHECK_THROWS_AS(symbol_from_json(json::parse(head + "[{\"word\": \"1..2\", \"matrix\": [[1]]}]}")), InputError);
    CHECK_THROWS_AS(lifting_parts_from_json(json::parse("{\"d\": 1, \"dim_C\": 0, \"dim_A\": 0}")), InputError);
    CHECK_THROWS_AS(read_json_file("/nonexistent/fockdil.json"), InputError);

    const std::string path = "fockdil_io_bad.json";
    {
        std::ofstream out(path);
        out << "{ not json";
    }
    CHECK_THROWS_AS(read_json_file(path), InputError);
    std::remove(path.c_str());
}
