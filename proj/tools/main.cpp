#include "dollarex/experiments.hpp"

int main(int argc, char** argv) { return dollarex::parse_and_dispatch(argc, argv); }
