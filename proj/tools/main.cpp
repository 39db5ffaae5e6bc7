#include "hmc_search/cli.hpp"

int main(int argc, char** argv) { return hmc_search::dispatch(argc, argv); }
