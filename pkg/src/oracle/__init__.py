# Independent reference computations used by the test suite
