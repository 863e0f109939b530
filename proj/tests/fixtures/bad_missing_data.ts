@problemName broken
@equalLength true
@seriesLength 3
@classLabel true a b
1,2,3:a
