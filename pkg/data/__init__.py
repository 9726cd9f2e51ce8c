# data package
# Customer preference distributions and the truncated-normal customer model.
