#include <gtest/gtest.h>

#include "ara/providers.hpp"

namespace {

// Every test runs offline; a real request anywhere in the suite fails it.
class NoLiveNetwork : public ::testing::Environment {
public:
    void TearDown() override { EXPECT_EQ(ara::providers::live_network_calls(), 0u); }
};

} // namespace

int main(int argc, char** argv) {
    ::testing::InitGoogleTest(&argc, argv);
    ::testing::AddGlobalTestEnvironment(new NoLiveNetwork);
    return RUN_ALL_TESTS();
}
