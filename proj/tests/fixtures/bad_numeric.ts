@problemName broken
@classLabel true a b
@data
1,2,3:a
4,x5,6:b
