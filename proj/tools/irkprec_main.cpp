#include "irkprec/study.hpp"

int main(int argc, char** argv) { return irkprec::run_main(argc, argv); }
