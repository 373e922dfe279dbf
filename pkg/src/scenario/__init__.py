# Node geometry, path loss and channel realizations
