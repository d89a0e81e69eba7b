"""Signal-model generators: right-vector profiles, sparse left vectors, data"""
