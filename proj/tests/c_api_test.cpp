#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "gcs/gcs.h"

namespace {

using nlohmann::json;

std::string Take(char* s) {
  std::string out = s;
  gcs_string_free(s);
  return out;
}

TEST(CApi, SolvesGeneratedChain) {
  gcs_graph* g = nullptr;
  ASSERT_EQ(gcs_graph_generate("hpp:3", &g), GCS_OK);
  EXPECT_EQ(gcs_graph_num_vertices(g), 5);
  EXPECT_EQ(gcs_graph_dim(g), 1);
  EXPECT_FALSE(gcs_graph_is_acyclic(g));
  EXPECT_STREQ(gcs_graph_vertex_id(g, 0), "s");
  EXPECT_EQ(gcs_graph_vertex_id(g, 99), nullptr);

  gcs_options opts;
  gcs_options_default(&opts);
  int lines = 0;
  auto count = [](const char*, void* user) { ++*static_cast<int*>(user); };
  gcs_result* r = nullptr;
  ASSERT_EQ(gcs_solve(g, &opts, count, &lines, &r), GCS_OK);
  EXPECT_EQ(gcs_result_status(r), GCS_STATUS_OPTIMAL);
  EXPECT_NEAR(gcs_result_cost(r), 0.25, 1e-6);
  EXPECT_LE(gcs_result_bound(r), gcs_result_cost(r) + 1e-7);
  EXPECT_EQ(gcs_result_nodes(r), lines);
  ASSERT_EQ(gcs_result_path_length(r), 5);
  EXPECT_EQ(gcs_result_path_vertex(r, 0), 0);
  double x[4];
  EXPECT_EQ(gcs_result_position(r, 4, x, 4), 1);
  EXPECT_NEAR(x[0], 1.0, 1e-6);
  EXPECT_EQ(gcs_result_position(r, 5, x, 4), -1);
  EXPECT_EQ(gcs_result_horizon(r), -1);

  char* text = nullptr;
  ASSERT_EQ(gcs_result_to_json(r, &text), GCS_OK);
  const json j = json::parse(Take(text));
  EXPECT_EQ(j["status"], "optimal");
  EXPECT_NEAR(j["gap"].get<double>(),
              (j["cost"].get<double>() - j["relaxation"].get<double>()) / j["cost"].get<double>(), 1e-12);
  EXPECT_TRUE(j["certificate"]["pass"].get<bool>());
  EXPECT_EQ(gcs_result_trajectory_csv(r, &text), GCS_E_INVALID_ARGUMENT);

  EXPECT_EQ(gcs_result_svg(r, 0, 1, &text), GCS_E_INVALID_ARGUMENT);
  gcs_result_free(r);
  gcs_graph_free(g);
}

TEST(CApi, RelaxModeMatchesJsonRoundTrip) {
  gcs_graph* g = nullptr;
  ASSERT_EQ(gcs_graph_generate("random:4:2:12:30:0.01", &g), GCS_OK);
  char* text = nullptr;
  ASSERT_EQ(gcs_graph_to_json(g, &text), GCS_OK);
  gcs_graph* back = nullptr;
  ASSERT_EQ(gcs_graph_from_json(Take(text).c_str(), &back), GCS_OK);

  gcs_options opts;
  gcs_options_default(&opts);
  opts.mode = GCS_MODE_RELAX;
  gcs_result *a = nullptr, *b = nullptr;
  ASSERT_EQ(gcs_solve(g, &opts, nullptr, nullptr, &a), GCS_OK);
  ASSERT_EQ(gcs_solve(back, &opts, nullptr, nullptr, &b), GCS_OK);
  EXPECT_EQ(gcs_result_cost(a), gcs_result_cost(b));
  EXPECT_TRUE(std::isnan(gcs_result_gap(a)));
  ASSERT_EQ(gcs_result_svg(a, 1, 0, &text), GCS_OK);
  EXPECT_EQ(Take(text).rfind("<svg", 0), 0u);
  gcs_result_free(a);
  gcs_result_free(b);
  gcs_graph_free(g);
  gcs_graph_free(back);
}

TEST(CApi, ErrorCodes) {
  gcs_graph* g = nullptr;
  EXPECT_EQ(gcs_graph_load("/nonexistent/x.json", &g), GCS_E_IO);
  EXPECT_NE(std::strstr(gcs_last_error(), "cannot open"), nullptr);
  EXPECT_EQ(gcs_graph_from_json("{\"vertices\": [}", &g), GCS_E_PARSE);
  EXPECT_EQ(std::string(gcs_last_error()).rfind("line 1", 0), 0u);
  EXPECT_EQ(gcs_graph_generate("hpp:x", &g), GCS_E_PARSE);
  EXPECT_EQ(gcs_graph_generate("nope", &g), GCS_E_PARSE);
  EXPECT_EQ(gcs_graph_generate("hpp:2", nullptr), GCS_E_INVALID_ARGUMENT);
  EXPECT_EQ(g, nullptr);

  ASSERT_EQ(gcs_graph_generate("hpp:2", &g), GCS_OK);
  gcs_options opts;
  gcs_options_default(&opts);
  opts.tol_feas = -1;
  gcs_result* r = nullptr;
  EXPECT_EQ(gcs_solve(g, &opts, nullptr, nullptr, &r), GCS_E_INVALID_ARGUMENT);
  EXPECT_EQ(gcs_solve(nullptr, &opts, nullptr, nullptr, &r), GCS_E_INVALID_ARGUMENT);
  gcs_graph_free(g);
  gcs_graph_free(nullptr);
  gcs_result_free(nullptr);
}

TEST(CApi, ControlTrajectory) {
  gcs_control* c = nullptr;
  ASSERT_EQ(gcs_control_builtin("footstep-small:4", &c), GCS_OK);
  gcs_graph* g = nullptr;
  ASSERT_EQ(gcs_control_graph(c, &g), GCS_OK);
  EXPECT_EQ(gcs_graph_num_vertices(g), 4 * 4 + 2);
  gcs_graph_free(g);

  gcs_options opts;
  gcs_options_default(&opts);
  gcs_result* r = nullptr;
  ASSERT_EQ(gcs_control_solve(c, &opts, nullptr, nullptr, &r), GCS_OK);
  EXPECT_EQ(gcs_result_status(r), GCS_STATUS_OPTIMAL);
  EXPECT_EQ(gcs_result_horizon(r), 4);
  char* csv = nullptr;
  ASSERT_EQ(gcs_result_trajectory_csv(r, &csv), GCS_OK);
  const std::string text = Take(csv);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 5);
  char* js = nullptr;
  ASSERT_EQ(gcs_result_to_json(r, &js), GCS_OK);
  const json j = json::parse(Take(js));
  EXPECT_LT(j["trajectory"]["dynamics_residual"].get<double>(), 1e-5);
  gcs_result_free(r);

  ASSERT_EQ(gcs_control_to_json(c, &js), GCS_OK);
  gcs_control* back = nullptr;
  ASSERT_EQ(gcs_control_from_json(Take(js).c_str(), &back), GCS_OK);
  gcs_control_free(back);
  gcs_control_free(c);
  EXPECT_EQ(gcs_control_builtin("footstep-small:x", &c), GCS_E_PARSE);
}

}  // namespace
