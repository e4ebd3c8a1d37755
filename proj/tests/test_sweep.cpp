#include <gtest/gtest.h>

#include <cstdlib>
#include <stdexcept>

#include "atomwave/sweep.hpp"

using namespace atomwave;

TEST(Sweep, ResultsKeepCellOrder) {
  for (int workers : {1, 2, 4, 7}) {
    const auto r = run_sweep<std::size_t>(50, workers, [](std::size_t i) { return i * i; });
    ASSERT_EQ(r.size(), 50u);
    for (std::size_t i = 0; i < r.size(); ++i) {
      EXPECT_EQ(r[i].index, i);
      ASSERT_TRUE(r[i].ok());
      EXPECT_EQ(*r[i].value, i * i);
    }
  }
}

TEST(Sweep, FailingCellsAreCapturedAndOthersComplete) {
  const auto r = run_sweep<int>(10, 3, [](std::size_t i) {
    if (i % 4 == 1) throw std::runtime_error("cell " + std::to_string(i) + " broke");
    return static_cast<int>(i);
  });
  for (std::size_t i = 0; i < r.size(); ++i) {
    EXPECT_EQ(r[i].ok(), i % 4 != 1);
    if (!r[i].ok()) {
      EXPECT_EQ(r[i].error, "cell " + std::to_string(i) + " broke");
    }
  }
}

TEST(Sweep, EmptyAndInvalid) {
  EXPECT_TRUE(run_sweep<int>(0, 4, [](std::size_t) { return 1; }).empty());
  EXPECT_THROW(run_sweep<int>(3, 0, [](std::size_t) { return 1; }), Error);
}

TEST(Sweep, WorkerCountFromEnvironment) {
  ::setenv("ATOMWAVE_WORKERS", "3", 1);
  EXPECT_EQ(default_workers(), 3);
  ::setenv("ATOMWAVE_WORKERS", "zero", 1);
  EXPECT_GE(default_workers(), 1);
  ::unsetenv("ATOMWAVE_WORKERS");
  EXPECT_GE(default_workers(), 1);
}
