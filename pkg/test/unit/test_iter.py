from surgesim.iter import first_index, settled_index


class TestIter:
    def test_first_index(self):
        assert first_index([5, 3, 0, 0], lambda x: x == 0) == 2
        assert first_index([5, 3], lambda x: x == 0) is None
        assert first_index([], lambda x: True) is None

    def test_settled_index(self):
        # a zero followed by a rise is not settled
        assert settled_index([0, 0, 4, 2, 0, 0], lambda x: x == 0) == 4
        assert settled_index([3, 2, 1], lambda x: x == 0) is None
        assert settled_index([0, 0], lambda x: x == 0) == 0
        assert settled_index([], lambda x: x == 0) is None
