#include "projcred/app.hpp"

int main(int argc, char** argv) { return projcred::run_cli(argc, argv); }
