# Unit Tests Package for fusionkit
